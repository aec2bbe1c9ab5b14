#include "twinbeam/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "twinbeam/error.hpp"
#include "twinbeam/parallel.hpp"

namespace twinbeam {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

long poisson_gamma(std::mt19937_64& rng, double shape, double scale) {
  if (scale <= 0.0) return 0;
  const double lambda = std::gamma_distribution<double>(shape, scale)(rng);
  if (lambda <= 0.0) return 0;
  return std::poisson_distribution<long>(lambda)(rng);
}

long thin(std::mt19937_64& rng, long n, double p) {
  if (p >= 1.0 || n == 0) return n;
  if (p <= 0.0) return 0;
  return std::binomial_distribution<long>(n, p)(rng);
}

}  // namespace

RawCountData sample_shots(const SimConfig& cfg) {
  const TwinBeamModel& m = cfg.model;
  m.validate();
  if (cfg.shots < 1) {
    throw Error(Errc::invalid_argument, "shots must be at least 1");
  }
  if (!(cfg.eta > 0.0 && cfg.eta <= 1.0)) {
    throw Error(Errc::invalid_eta, "detection efficiency must lie in (0, 1]");
  }
  if (m.k() > 0.0) {
    throw Error(Errc::unsupported_model, "sampler needs K <= 0 (pair-correlated model)");
  }
  if (!m.physical()) {
    throw Error(Errc::unsupported_model, "sampler needs B_i + K >= 0");
  }
  const double q = std::min(1.0, -m.k() / m.b1);
  const double a = m.noise2() / (1.0 + m.b1);

  RawCountData out;
  out.eta = cfg.eta;
  out.shots.resize(static_cast<std::size_t>(cfg.shots));
  const long chunks = (cfg.shots + kShotChunk - 1) / kShotChunk;
  parallel_for(0, chunks, cfg.threads, [&](long c) {
    std::mt19937_64 rng(splitmix64(cfg.seed + static_cast<std::uint64_t>(c)));
    const long end = std::min(cfg.shots, (c + 1) * kShotChunk);
    for (long i = c * kShotChunk; i < end; ++i) {
      const long n1 = poisson_gamma(rng, m.modes, m.b1);
      const long paired = thin(rng, n1, q);
      const long n2 = paired + poisson_gamma(rng, static_cast<double>(n1) + m.modes, a);
      auto& shot = out.shots[static_cast<std::size_t>(i)];
      shot.m1 = thin(rng, n1, cfg.eta);
      shot.m2 = thin(rng, n2, cfg.eta);
    }
  });
  return out;
}

MomentSet brute_moments(const JointPhotonDistribution& joint) {
  if (!(joint.captured_mass() >= 1.0 - 1e-6)) {
    throw Error(Errc::insufficient_mass, "grid captures only " +
                                             std::to_string(joint.captured_mass()) +
                                             " of the probability; enlarge it");
  }
  long double s1 = 0, s2 = 0, q1 = 0, q2 = 0, c = 0;
  joint.for_each([&](long n1, long n2, double p) {
    const long double a = n1, b = n2, pl = p;
    s1 += a * pl;
    s2 += b * pl;
    q1 += a * a * pl;
    q2 += b * b * pl;
    c += a * b * pl;
  });
  MomentSet out;
  out.level = MomentLevel::photon;
  out.mean1 = static_cast<double>(s1);
  out.mean2 = static_cast<double>(s2);
  out.second1 = static_cast<double>(q1);
  out.second2 = static_cast<double>(q2);
  out.cross = static_cast<double>(c);
  return out;
}

BatchFit fit_with_batch_errors(const RawCountData& data, ModePolicy policy, long batches) {
  const long n = static_cast<long>(data.shots.size());
  if (batches < 2 || n < 2 * batches) {
    throw Error(Errc::invalid_argument, "need at least 2 batches of 2 shots");
  }
  auto fit_span = [&](std::span<const ShotCounts> shots) {
    const MomentSet pe = reduce_shots(shots);
    return fit(photon_to_intensity(photoelectron_to_photon(pe, data.eta)), policy);
  };
  BatchFit out;
  out.batches = batches;
  out.model = fit_span(data.shots);

  const long size = n / batches;
  std::vector<TwinBeamModel> fits;
  for (long b = 0; b < batches; ++b) {
    fits.push_back(fit_span(std::span<const ShotCounts>(data.shots).subspan(
        static_cast<std::size_t>(b * size), static_cast<std::size_t>(size))));
  }
  auto se = [&](double TwinBeamModel::*field) {
    long double mean = 0, sq = 0;
    for (const auto& f : fits) mean += f.*field;
    mean /= batches;
    for (const auto& f : fits) sq += (f.*field - mean) * (f.*field - mean);
    return static_cast<double>(std::sqrt(sq / (batches - 1) / batches));
  };
  out.std_error.b1 = se(&TwinBeamModel::b1);
  out.std_error.b2 = se(&TwinBeamModel::b2);
  out.std_error.modes = se(&TwinBeamModel::modes);
  out.std_error.d12 = se(&TwinBeamModel::d12);
  out.std_error.m1_modes = se(&TwinBeamModel::m1_modes);
  out.std_error.m2_modes = se(&TwinBeamModel::m2_modes);
  return out;
}

double binned_tv_distance(const RawCountData& data, const JointPhotonDistribution& joint,
                          long bin) {
  if (bin < 1 || data.shots.empty()) {
    throw Error(Errc::invalid_argument, "TV distance needs shots and a positive bin width");
  }
  const long nb1 = joint.n1_max() / bin + 1;
  const long nb2 = joint.n2_max() / bin + 1;
  std::vector<long double> model(static_cast<std::size_t>(nb1 * nb2), 0);
  joint.for_each([&](long n1, long n2, double p) {
    model[static_cast<std::size_t>((n1 / bin) * nb2 + n2 / bin)] += p;
  });
  std::vector<long> counts(model.size(), 0);
  long outside = 0;
  for (const auto& s : data.shots) {
    if (s.m1 > joint.n1_max() || s.m2 > joint.n2_max()) {
      ++outside;
      continue;
    }
    ++counts[static_cast<std::size_t>((s.m1 / bin) * nb2 + s.m2 / bin)];
  }
  const long double total = static_cast<long double>(data.shots.size());
  long double tv = static_cast<long double>(outside) / total;
  for (std::size_t k = 0; k < model.size(); ++k) {
    tv += std::fabs(counts[k] / total - model[k]);
  }
  return static_cast<double>(0.5L * tv);
}

}  // namespace twinbeam
