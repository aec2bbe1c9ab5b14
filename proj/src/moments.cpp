#include "twinbeam/moments.hpp"

#include <cmath>
#include <string>

#include "twinbeam/error.hpp"

namespace twinbeam {
namespace {

// Relative slack for round-off when checking variance signs.
constexpr double kVarianceSlack = 1e-12;

void require_level(const MomentSet& m, MomentLevel level, const char* what) {
  if (m.level != level) {
    throw Error(Errc::level_mismatch, std::string(what) + " expects " +
                                          std::string(to_string(level)) + " moments, got " +
                                          std::string(to_string(m.level)));
  }
}

void require_eta(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw Error(Errc::invalid_eta, "detection efficiency must lie in (0, 1], got " +
                                       std::to_string(eta));
  }
}

bool negative_beyond_slack(double variance, double second) {
  return variance < -kVarianceSlack * std::fabs(second);
}

}  // namespace

std::string_view to_string(MomentLevel level) noexcept {
  switch (level) {
    case MomentLevel::photoelectron: return "photoelectron";
    case MomentLevel::photon: return "photon";
    case MomentLevel::intensity: return "intensity";
  }
  return "unknown";
}

std::optional<MomentLevel> parse_moment_level(std::string_view text) noexcept {
  if (text == "photoelectron") return MomentLevel::photoelectron;
  if (text == "photon") return MomentLevel::photon;
  if (text == "intensity") return MomentLevel::intensity;
  return std::nullopt;
}

void MomentSet::validate() const {
  for (double v : {mean1, mean2, second1, second2, cross}) {
    if (!std::isfinite(v)) {
      throw Error(Errc::invalid_argument, "moment set contains a non-finite value");
    }
  }
  if (mean1 < 0.0 || mean2 < 0.0) {
    throw Error(Errc::negative_mean, "moment set has a negative mean");
  }
  if (negative_beyond_slack(variance1(), second1) ||
      negative_beyond_slack(variance2(), second2)) {
    throw Error(Errc::negative_variance, "moment set has second moment below mean squared");
  }
}

MomentSet reduce_shots(std::span<const ShotCounts> shots) {
  if (shots.empty()) {
    throw Error(Errc::empty_data, "no shots to reduce");
  }
  using LD = long double;
  const LD n = static_cast<LD>(shots.size());
  LD sum1 = 0;
  LD sum2 = 0;
  for (const auto& s : shots) {
    if (s.m1 < 0 || s.m2 < 0) {
      throw Error(Errc::invalid_argument, "photocounts must be nonnegative");
    }
    sum1 += static_cast<LD>(s.m1);
    sum2 += static_cast<LD>(s.m2);
  }
  const LD mean1 = sum1 / n;
  const LD mean2 = sum2 / n;
  LD c11 = 0;
  LD c22 = 0;
  LD c12 = 0;
  for (const auto& s : shots) {
    const LD d1 = static_cast<LD>(s.m1) - mean1;
    const LD d2 = static_cast<LD>(s.m2) - mean2;
    c11 += d1 * d1;
    c22 += d2 * d2;
    c12 += d1 * d2;
  }
  MomentSet out;
  out.level = MomentLevel::photoelectron;
  out.mean1 = static_cast<double>(mean1);
  out.mean2 = static_cast<double>(mean2);
  out.second1 = static_cast<double>(c11 / n + mean1 * mean1);
  out.second2 = static_cast<double>(c22 / n + mean2 * mean2);
  out.cross = static_cast<double>(c12 / n + mean1 * mean2);
  return out;
}

MomentSet reduce_shots(const RawCountData& data) {
  require_eta(data.eta);
  return reduce_shots(std::span<const ShotCounts>(data.shots));
}

MomentSet subtract_noise(const MomentSet& signal, const MomentSet& noise) {
  require_level(signal, MomentLevel::photoelectron, "subtract_noise");
  require_level(noise, MomentLevel::photoelectron, "subtract_noise");
  MomentSet out;
  out.level = MomentLevel::photoelectron;
  out.mean1 = signal.mean1 - noise.mean1;
  out.mean2 = signal.mean2 - noise.mean2;
  if (out.mean1 < 0.0 || out.mean2 < 0.0) {
    throw Error(Errc::negative_mean, "noise mean exceeds signal mean");
  }
  out.second1 = signal.second1 - 2.0 * out.mean1 * noise.mean1 - noise.second1;
  out.second2 = signal.second2 - 2.0 * out.mean2 * noise.mean2 - noise.second2;
  out.cross = signal.cross - out.mean1 * noise.mean2 - out.mean2 * noise.mean1 - noise.cross;
  if (negative_beyond_slack(out.variance1(), signal.second1) ||
      negative_beyond_slack(out.variance2(), signal.second2)) {
    throw Error(Errc::negative_variance, "noise variance exceeds signal variance");
  }
  return out;
}

MomentSet photoelectron_to_photon(const MomentSet& m, double eta) {
  require_level(m, MomentLevel::photoelectron, "photoelectron_to_photon");
  require_eta(eta);
  const double eta2 = eta * eta;
  MomentSet n;
  n.level = MomentLevel::photon;
  n.mean1 = m.mean1 / eta;
  n.mean2 = m.mean2 / eta;
  n.second1 = m.second1 / eta2 - (1.0 - eta) * m.mean1 / eta2;
  n.second2 = m.second2 / eta2 - (1.0 - eta) * m.mean2 / eta2;
  n.cross = m.cross / eta2;
  return n;
}

MomentSet photon_to_photoelectron(const MomentSet& n, double eta) {
  require_level(n, MomentLevel::photon, "photon_to_photoelectron");
  require_eta(eta);
  const double eta2 = eta * eta;
  MomentSet m;
  m.level = MomentLevel::photoelectron;
  m.mean1 = eta * n.mean1;
  m.mean2 = eta * n.mean2;
  m.second1 = eta2 * n.second1 + (1.0 - eta) * m.mean1;
  m.second2 = eta2 * n.second2 + (1.0 - eta) * m.mean2;
  m.cross = eta2 * n.cross;
  return m;
}

MomentSet photon_to_intensity(const MomentSet& n) {
  require_level(n, MomentLevel::photon, "photon_to_intensity");
  MomentSet w;
  w.level = MomentLevel::intensity;
  w.mean1 = n.mean1;
  w.mean2 = n.mean2;
  w.second1 = n.second1 - n.mean1;
  w.second2 = n.second2 - n.mean2;
  w.cross = n.cross;
  if (negative_beyond_slack(w.variance1(), n.second1) ||
      negative_beyond_slack(w.variance2(), n.second2)) {
    throw Error(Errc::negative_variance,
                "photon moments are more sub-Poissonian than the intensity model allows");
  }
  return w;
}

MomentSet intensity_to_photon_moments(const MomentSet& w) {
  require_level(w, MomentLevel::intensity, "intensity_to_photon_moments");
  MomentSet n;
  n.level = MomentLevel::photon;
  n.mean1 = w.mean1;
  n.mean2 = w.mean2;
  n.second1 = w.second1 + w.mean1;
  n.second2 = w.second2 + w.mean2;
  n.cross = w.cross;
  return n;
}

double burgess_map(double fano_photon, double eta) {
  return 1.0 + eta * (fano_photon - 1.0);
}

}  // namespace twinbeam
