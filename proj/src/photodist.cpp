#include "twinbeam/photodist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twinbeam/error.hpp"
#include "twinbeam/parallel.hpp"
#include "twinbeam/special.hpp"

namespace twinbeam {
namespace {

using LD = long double;
using special::log_gamma;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Relative size (to the peak term) below which summation stops.
constexpr double kTinyPositive = 1e-20;
constexpr double kTinyAlternating = 1e-26;
// Lost digits above which the double-precision terms are redone in long double.
constexpr double kExtendDigits = 6.0;

struct SeriesConstants {
  double modes;
  LD lg_modes;
  int k_sign;  // sign of K
  LD log_abs_k, log_noise1, log_noise2, log_den;
  double rho;  // noise1 noise2 / (|K| Den), may be 0 or +inf
};

SeriesConstants series_constants(const TwinBeamModel& m) {
  SeriesConstants c{};
  const double k = m.k();
  const double n1 = m.noise1();
  const double n2 = m.noise2();
  const double den = 1.0 + m.b1 + m.b2 + k;
  c.modes = m.modes;
  c.lg_modes = log_gamma<LD>(m.modes);
  c.k_sign = (k > 0.0) - (k < 0.0);
  c.log_abs_k = std::log(static_cast<LD>(std::fabs(k)));
  c.log_noise1 = std::log(static_cast<LD>(n1));
  c.log_noise2 = std::log(static_cast<LD>(n2));
  c.log_den = std::log(static_cast<LD>(den));
  c.rho = (n1 * n2) / (std::fabs(k) * den);
  return c;
}

// Log magnitude of the r-th term.
LD log_term(const SeriesConstants& c, long n1, long n2, long r) {
  const LD M = c.modes;
  const LD a = static_cast<LD>(n2 - r);
  const LD b = static_cast<LD>(n1 - n2 + r);
  const LD rr = static_cast<LD>(r);
  LD v = log_gamma<LD>(n1 + M + rr) - log_gamma<LD>(rr + 1) - log_gamma<LD>(a + 1) -
         log_gamma<LD>(b + 1) - c.lg_modes;
  if ((a > 0 && c.k_sign == 0) || (b > 0 && std::isinf(c.log_noise1)) ||
      (rr > 0 && std::isinf(c.log_noise2))) {
    return -std::numeric_limits<LD>::infinity();
  }
  // Zero exponents contribute nothing even when the base is zero.
  if (a > 0) v += a * c.log_abs_k;
  if (b > 0) v += b * c.log_noise1;
  if (rr > 0) v += rr * c.log_noise2;
  return v - (n1 + M + rr) * c.log_den;
}

struct PointSum {
  LD log_peak = -std::numeric_limits<LD>::infinity();
  special::SignedAccumulator acc;
};

// Sums the terms relative to the largest one, walking outward in both
// directions with the term ratio recurrence.
template <class Real>
void accumulate_terms(const SeriesConstants& c, long n1, long n2, long r_lo, long r_hi,
                      long peak, PointSum& out) {
  const Real M = static_cast<Real>(c.modes);
  const Real rho = static_cast<Real>(c.rho);
  const Real tiny = c.k_sign > 0 ? kTinyAlternating : kTinyPositive;
  auto sign_of = [&](long r) { return (c.k_sign > 0 && ((n2 - r) & 1)) ? -1 : 1; };
  auto ratio = [&](long r) {  // t(r + 1) / t(r)
    return (Real(n1) + M + Real(r)) * Real(n2 - r) / ((Real(r) + 1) * Real(n1 - n2 + r + 1)) *
           rho;
  };
  out.acc = {};
  out.acc.add(1, sign_of(peak));
  Real t = 1;
  for (long r = peak; r < r_hi; ++r) {
    t *= ratio(r);
    if (!(t > tiny)) {
      if (t > 0) out.acc.add(t, sign_of(r + 1));
      break;
    }
    out.acc.add(t, sign_of(r + 1));
  }
  t = 1;
  for (long r = peak; r > r_lo; --r) {
    t /= ratio(r - 1);
    if (!(t > tiny)) {
      if (t > 0) out.acc.add(t, sign_of(r - 1));
      break;
    }
    out.acc.add(t, sign_of(r - 1));
  }
}

struct PointResult {
  SignedLog value;
  double digits_lost = 0.0;
  bool extended = false;
};

PointResult eval_point(const SeriesConstants& c, long n1, long n2, double max_cancel_digits) {
  PointResult res;
  const long r_lo = std::max(0L, n2 - n1);
  const long r_hi = n2;
  // The log term ratio decreases in r, so the peak is the first r where it
  // drops to 1 or below.
  const LD log_rho = c.log_noise1 + c.log_noise2 - c.log_abs_k - c.log_den;
  auto log_ratio = [&](long r) {
    return std::log(static_cast<LD>(n1) + c.modes + r) + std::log(static_cast<LD>(n2 - r)) -
           std::log(static_cast<LD>(r) + 1) - std::log(static_cast<LD>(n1 - n2 + r + 1)) +
           log_rho;
  };
  long lo = r_lo;
  long hi = r_hi;
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (log_ratio(mid) > 0) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  const long peak = lo;
  PointSum sum;
  sum.log_peak = log_term(c, n1, n2, peak);
  if (!std::isfinite(sum.log_peak)) {
    return res;
  }
  accumulate_terms<double>(c, n1, n2, r_lo, r_hi, peak, sum);
  double lost = sum.acc.digits_lost();
  if (lost > kExtendDigits) {
    accumulate_terms<LD>(c, n1, n2, r_lo, r_hi, peak, sum);
    lost = sum.acc.digits_lost();
    res.extended = true;
  }
  res.digits_lost = lost;
  if (lost > max_cancel_digits) {
    throw Error(Errc::cancellation_overflow,
                "alternating sum at (n1=" + std::to_string(n1) + ", n2=" + std::to_string(n2) +
                    ") cancels " + std::to_string(lost) + " digits (limit " +
                    std::to_string(max_cancel_digits) + "); reduce the grid");
  }
  const LD s = sum.acc.value();
  if (s == 0) {
    return res;
  }
  res.value.sign = s > 0 ? 1 : -1;
  res.value.log_magnitude = static_cast<double>(sum.log_peak + std::log(std::fabs(s)));
  return res;
}

void check_grid_bound(long n) {
  if (n < 0) {
    throw Error(Errc::invalid_argument, "grid bounds must be nonnegative");
  }
}

// Fills rows band by band. center(n1) estimates the conditional mean of n2;
// eval(n1, n2) returns one point.
template <class Eval>
JointPhotonDistribution build_grid(const TwinBeamModel& model, const JointOptions& opt,
                                   double center_slope, double center_offset, Eval&& eval) {
  const long n1_max = opt.n1_max.value_or(
      auto_grid_max(model.modes, model.b1, opt.sigma_span, opt.tail_mass));
  const long n2_max = opt.n2_max.value_or(
      auto_grid_max(model.modes, model.b2, opt.sigma_span, opt.tail_mass));
  check_grid_bound(n1_max);
  check_grid_bound(n2_max);
  if (!(opt.band_log_cutoff > 0.0)) {
    throw Error(Errc::invalid_argument, "band cutoff must be positive");
  }

  std::vector<JointPhotonDistribution::Row> rows(static_cast<std::size_t>(n1_max + 1));
  std::vector<CancellationStats> row_stats(rows.size());

  parallel_for(0, n1_max + 1, opt.threads, [&](long n1) {
    CancellationStats& st = row_stats[static_cast<std::size_t>(n1)];
    double row_max = kNegInf;
    auto point = [&](long n2) {
      const PointResult p = eval(n1, n2);
      ++st.evaluated_points;
      st.extended_points += p.extended;
      st.max_digits_lost = std::max(st.max_digits_lost, p.digits_lost);
      if (p.value.sign < 0 && p.value.value() < -opt.negative_tolerance) {
        throw Error(Errc::cancellation_overflow,
                    "negative probability " + std::to_string(p.value.value()) + " at (n1=" +
                        std::to_string(n1) + ", n2=" + std::to_string(n2) + ")");
      }
      row_max = std::max(row_max, p.value.log_magnitude);
      return p.value;
    };
    auto below_band = [&](const SignedLog& v) {
      return v.log_magnitude < row_max - opt.band_log_cutoff;
    };

    const double guess = center_slope * static_cast<double>(n1) + center_offset;
    const long c = std::clamp(static_cast<long>(std::lround(std::max(guess, 0.0))), 0L, n2_max);
    std::vector<SignedLog> up;
    for (long n2 = c; n2 <= n2_max; ++n2) {
      up.push_back(point(n2));
      if (n2 > c && below_band(up.back())) break;
    }
    std::vector<SignedLog> down;
    for (long n2 = c - 1; n2 >= 0; --n2) {
      down.push_back(point(n2));
      if (below_band(down.back())) break;
    }
    auto& row = rows[static_cast<std::size_t>(n1)];
    row.first = c - static_cast<long>(down.size());
    row.entries.assign(down.rbegin(), down.rend());
    row.entries.insert(row.entries.end(), up.begin(), up.end());
  });

  CancellationStats stats;
  for (const auto& s : row_stats) {
    stats.max_digits_lost = std::max(stats.max_digits_lost, s.max_digits_lost);
    stats.extended_points += s.extended_points;
    stats.evaluated_points += s.evaluated_points;
  }
  return JointPhotonDistribution(model, n1_max, n2_max, std::move(rows), stats);
}

}  // namespace

JointPhotonDistribution::JointPhotonDistribution(TwinBeamModel model, long n1_max, long n2_max,
                                                 std::vector<Row> rows, CancellationStats stats)
    : model_(model), n1_max_(n1_max), n2_max_(n2_max), rows_(std::move(rows)), stats_(stats) {
  if (rows_.size() != static_cast<std::size_t>(n1_max_ + 1)) {
    throw Error(Errc::invalid_argument, "row count does not match n1_max");
  }
  LD total = 0;
  for (const auto& r : rows_) {
    if (r.first < 0 || r.first + static_cast<long>(r.entries.size()) > n2_max_ + 1) {
      throw Error(Errc::invalid_argument, "row band exceeds the grid");
    }
    for (const auto& e : r.entries) total += e.value();
  }
  captured_mass_ = static_cast<double>(total);
}

const JointPhotonDistribution::Row& JointPhotonDistribution::row(long n1) const {
  if (n1 < 0 || n1 > n1_max_) {
    throw Error(Errc::out_of_range, "n1 = " + std::to_string(n1) + " is outside the grid");
  }
  return rows_[static_cast<std::size_t>(n1)];
}

SignedLog JointPhotonDistribution::log_prob(long n1, long n2) const {
  if (n2 < 0 || n2 > n2_max_) {
    throw Error(Errc::out_of_range, "n2 = " + std::to_string(n2) + " is outside the grid");
  }
  const Row& r = row(n1);
  const long j = n2 - r.first;
  if (j < 0 || j >= static_cast<long>(r.entries.size())) {
    return {};
  }
  return r.entries[static_cast<std::size_t>(j)];
}

double JointPhotonDistribution::row_mass(long n1) const {
  LD s = 0;
  for (const auto& e : row(n1).entries) s += e.value();
  return static_cast<double>(s);
}

long auto_grid_max(double modes, double b, double sigma_span, double tail_mass) {
  if (!(modes > 0.0) || !(b > 0.0) || !std::isfinite(modes) || !std::isfinite(b)) {
    throw Error(Errc::invalid_argument, "auto grid needs positive modes and mean");
  }
  if (!(tail_mass > 0.0 && tail_mass < 1.0)) {
    throw Error(Errc::invalid_argument, "tail mass must lie in (0, 1)");
  }
  const double mean = modes * b;
  const double sd = std::sqrt(modes * b * (1.0 + b));
  const double by_sigma = std::ceil(mean + sigma_span * sd);

  // Negative-binomial quantile: p(0) = (1+b)^-M, p(n+1)/p(n) = (n+M) b / ((n+1)(1+b)).
  constexpr long kHardCap = 100'000'000;
  const LD x = static_cast<LD>(b) / (1 + static_cast<LD>(b));
  LD p = std::exp(-static_cast<LD>(modes) * std::log1p(static_cast<LD>(b)));
  LD cdf = p;
  long n = 0;
  while (1 - cdf > tail_mass && n < kHardCap) {
    p *= (n + static_cast<LD>(modes)) / (n + 1) * x;
    cdf += p;
    ++n;
  }
  if (n >= kHardCap || by_sigma > kHardCap) {
    throw Error(Errc::invalid_argument, "automatic grid would exceed 1e8 points per axis");
  }
  return std::max(static_cast<long>(by_sigma), n);
}

SignedLog joint_pn_point(const TwinBeamModel& model, long n1, long n2, double max_cancel_digits) {
  model.require_physical();
  if (n1 < 0 || n2 < 0) {
    throw Error(Errc::out_of_range, "photon numbers must be nonnegative");
  }
  return eval_point(series_constants(model), n1, n2, max_cancel_digits).value;
}

JointPhotonDistribution joint_pn(const TwinBeamModel& model, const JointOptions& options) {
  model.require_physical();
  const SeriesConstants c = series_constants(model);
  const double q = -model.k() / model.b1;
  const double a = model.noise2() / (1.0 + model.b1);
  return build_grid(model, options, q + a, model.modes * a, [&](long n1, long n2) {
    return eval_point(c, n1, n2, options.max_cancel_digits);
  });
}

JointPhotonDistribution joint_pn_border(double b1, double b2, double modes,
                                        const JointOptions& options) {
  TwinBeamModel model = TwinBeamModel::make(b1, b2, modes, std::sqrt(b1 * b2));
  const LD lg_m = log_gamma<LD>(modes);
  const LD lb1 = std::log(static_cast<LD>(b1));
  const LD lb2 = std::log(static_cast<LD>(b2));
  const LD lden = std::log1p(static_cast<LD>(b1) + b2);
  const double a = b2 / (1.0 + b1);
  return build_grid(model, options, a, modes * a, [&](long n1, long n2) {
    const LD v = log_gamma<LD>(n1 + n2 + static_cast<LD>(modes)) - lg_m -
                 log_gamma<LD>(n1 + LD(1)) - log_gamma<LD>(n2 + LD(1)) + n1 * lb1 + n2 * lb2 -
                 (n1 + n2 + static_cast<LD>(modes)) * lden;
    PointResult p;
    p.value = SignedLog::positive(static_cast<double>(v));
    return p;
  });
}

double conditional_fano_closed_form(const TwinBeamModel& model, long n1) {
  if (n1 < 0) {
    throw Error(Errc::out_of_range, "n1 must be nonnegative");
  }
  const double a = model.noise2() / (1.0 + model.b1);
  // q = -K/B1 = 1 - noise1/B1, exactly 1 when the signal carries no noise.
  const double q = 1.0 - model.noise1() / model.b1;
  if (n1 == 0) {
    return 1.0 + a;
  }
  const double x = 1.0 + model.modes / static_cast<double>(n1);
  return 1.0 + (x * a * a - q * q) / (x * a + q);
}

double conditional_fano_limit(const TwinBeamModel& model) {
  const double a = model.noise2() / (1.0 + model.b1);
  const double q = 1.0 - model.noise1() / model.b1;
  return 1.0 + a - q;
}

ConditionalDistribution conditional(const JointPhotonDistribution& joint, long n1) {
  const auto& row = joint.row(n1);
  ConditionalDistribution out;
  out.n1 = n1;
  out.first = row.first;
  out.row_mass = joint.row_mass(n1);
  if (!(out.row_mass > 1e-300)) {
    throw Error(Errc::empty_row, "row n1 = " + std::to_string(n1) + " carries no probability");
  }
  out.probs.reserve(row.entries.size());
  LD mean = 0;
  for (std::size_t j = 0; j < row.entries.size(); ++j) {
    const double p = row.entries[j].value() / out.row_mass;
    out.probs.push_back(p);
    mean += static_cast<LD>(p) * (row.first + static_cast<long>(j));
  }
  LD var = 0;
  for (std::size_t j = 0; j < out.probs.size(); ++j) {
    const LD d = (row.first + static_cast<long>(j)) - mean;
    var += out.probs[j] * d * d;
  }
  out.mean = static_cast<double>(mean);
  out.variance = static_cast<double>(var);
  out.fano_empirical = out.mean > 0.0 ? out.variance / out.mean : 0.0;
  out.fano_closed_form = conditional_fano_closed_form(joint.model(), n1);
  return out;
}

double DifferenceDistribution::at(long n) const {
  const long j = n - offset;
  if (j < 0 || j >= static_cast<long>(probs.size())) return 0.0;
  return probs[static_cast<std::size_t>(j)];
}

namespace {
DifferenceDistribution finish_difference(long offset, const std::vector<LD>& acc) {
  DifferenceDistribution d;
  d.offset = offset;
  d.probs.assign(acc.begin(), acc.end());
  LD mass = 0, first = 0;
  for (std::size_t j = 0; j < acc.size(); ++j) {
    mass += acc[j];
    first += acc[j] * (offset + static_cast<long>(j));
  }
  d.mass = static_cast<double>(mass);
  if (mass > 0) {
    const LD mean = first / mass;
    LD var = 0;
    for (std::size_t j = 0; j < acc.size(); ++j) {
      const LD x = offset + static_cast<long>(j) - mean;
      var += acc[j] * x * x;
    }
    d.mean = static_cast<double>(mean);
    d.variance = static_cast<double>(var / mass);
  }
  return d;
}
}  // namespace

DifferenceDistribution difference_pn(const JointPhotonDistribution& joint) {
  const long offset = -joint.n2_max();
  std::vector<LD> acc(static_cast<std::size_t>(joint.n1_max() + joint.n2_max() + 1), 0);
  joint.for_each([&](long n1, long n2, double p) {
    acc[static_cast<std::size_t>(n1 - n2 - offset)] += p;
  });
  return finish_difference(offset, acc);
}

DifferenceDistribution poisson_product_difference(double mean1, double mean2) {
  if (!(mean1 >= 0.0) || !(mean2 >= 0.0) || !std::isfinite(mean1) || !std::isfinite(mean2)) {
    throw Error(Errc::invalid_argument, "Poisson means must be finite and nonnegative");
  }
  auto pmf = [](double mu, long& lo) {
    const double span = 14.0 * std::sqrt(mu) + 12.0;
    lo = std::max(0L, static_cast<long>(std::floor(mu - span)));
    const long hi = static_cast<long>(std::ceil(mu + span));
    std::vector<double> p;
    for (long k = lo; k <= hi; ++k) {
      p.push_back(mu == 0.0 ? (k == 0 ? 1.0 : 0.0)
                            : std::exp(k * std::log(mu) - mu - special::log_factorial(k)));
    }
    return p;
  };
  long lo1 = 0, lo2 = 0;
  const auto p1 = pmf(mean1, lo1);
  const auto p2 = pmf(mean2, lo2);
  const long hi2 = lo2 + static_cast<long>(p2.size()) - 1;
  const long offset = lo1 - hi2;
  std::vector<LD> acc(p1.size() + p2.size() - 1, 0);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    for (std::size_t j = 0; j < p2.size(); ++j) {
      const long d = (lo1 + static_cast<long>(i)) - (lo2 + static_cast<long>(j));
      acc[static_cast<std::size_t>(d - offset)] += static_cast<LD>(p1[i]) * p2[j];
    }
  }
  return finish_difference(offset, acc);
}

double diagonal_band_mass(const JointPhotonDistribution& joint, double width) {
  LD s = 0;
  joint.for_each([&](long n1, long n2, double p) {
    if (std::fabs(static_cast<double>(n1 - n2)) <= width) s += p;
  });
  return static_cast<double>(s);
}

}  // namespace twinbeam
