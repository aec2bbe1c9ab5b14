#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <numbers>
#include <span>

namespace twinbeam::special {

/// Natural log of the gamma function for x > 0.
///
/// Arguments below 20 are shifted upward with the recurrence
/// Gamma(x + 1) = x Gamma(x); the shifted value is evaluated with ten terms
/// of the Stirling series, which is below 1e-24 relative at x = 20. The
/// routine is reentrant (unlike ::lgamma, which writes signgam), so it is
/// safe to call from worker threads.
template <std::floating_point Real>
Real log_gamma(Real x) {
  if (!(x > Real(0))) {
    return std::numeric_limits<Real>::quiet_NaN();
  }
  if (std::isinf(x)) {
    return x;
  }
  constexpr Real kShiftTo = 20;
  Real shift_log = 0;
  if (x < kShiftTo) {
    Real product = 1;
    while (x < kShiftTo) {
      product *= x;
      x += 1;
    }
    shift_log = std::log(product);
  }
  // Bernoulli coefficients B_{2k} / (2k (2k - 1)), k = 1..10.
  constexpr Real c[] = {
      Real(1) / Real(12),          Real(-1) / Real(360),
      Real(1) / Real(1260),        Real(-1) / Real(1680),
      Real(1) / Real(1188),        Real(-691) / Real(360360),
      Real(1) / Real(156),         Real(-3617) / Real(122400),
      Real(43867) / Real(244188),  Real(-174611) / Real(125400),
  };
  const Real inv = Real(1) / x;
  const Real z = inv * inv;
  Real series = c[9];
  for (int k = 8; k >= 0; --k) {
    series = series * z + c[k];
  }
  series *= inv;
  constexpr Real half_log_two_pi =
      Real(0.918938533204672741780329736405617639861L);
  return (x - Real(0.5)) * std::log(x) - x + half_log_two_pi + series - shift_log;
}

inline double log_gamma(double x) {
  return static_cast<double>(log_gamma<long double>(x));
}

/// log(n!) for n >= 0.
inline double log_factorial(long n) {
  return log_gamma(static_cast<double>(n) + 1.0);
}

/// k * log(x) with the convention 0 * log(0) = 0.
template <std::floating_point Real>
Real xlogy(Real k, Real x) {
  if (k == Real(0)) {
    return Real(0);
  }
  return k * std::log(x);
}

/// log I_nu(z) for nu > -1 and z >= 0.
///
/// Below the crossover max(30, nu^2 / 2) the power series is summed outward
/// from its largest term (all terms are positive); above it the large-argument
/// asymptotic expansion is used, which has converged past 1e-16 there.
double log_bessel_i(double nu, double z);

/// log( I_nu(z) / (z/2)^nu ). Finite at z = 0, where it equals -log Gamma(nu+1).
double log_bessel_i_reduced(double nu, double z);

/// Crossover argument between series and asymptotic branches.
inline double bessel_crossover(double nu) {
  return std::max(30.0, 0.5 * nu * nu);
}

/// log(sum exp(x_i)); returns -inf for an empty span or all -inf inputs.
double log_sum_exp(std::span<const double> values);

/// Positive and negative magnitudes accumulated separately so the lost digits
/// of an alternating series can be measured after the fact.
struct SignedAccumulator {
  long double positive = 0;
  long double negative = 0;

  void add(long double magnitude, int sign) {
    if (sign > 0) {
      positive += magnitude;
    } else if (sign < 0) {
      negative += magnitude;
    }
  }
  long double value() const { return positive - negative; }
  // Significant decimal digits cancelled: log10((P + N) / |P - N|).
  double digits_lost() const {
    const long double total = positive + negative;
    const long double diff = std::fabs(positive - negative);
    if (total == 0) {
      return 0.0;
    }
    if (diff == 0) {
      return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(std::log10(total / diff));
  }
};

}  // namespace twinbeam::special
