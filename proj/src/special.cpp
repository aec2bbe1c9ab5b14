#include "twinbeam/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twinbeam/error.hpp"

namespace twinbeam::special {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sum_k (z^2/4)^k / (k! Gamma(k + nu + 1)), in log form.
double log_reduced_series(double nu, double z) {
  using LD = long double;
  const LD quarter_z2 = LD(z) * LD(z) / 4;
  const LD log_quarter_z2 = std::log(quarter_z2);
  // Largest term: (k+1)(k+1+nu) crosses z^2/4.
  const double root = 0.5 * (-nu + std::sqrt(nu * nu + z * z)) - 1.0;
  const long peak = std::max(0L, static_cast<long>(std::ceil(root)));
  const auto log_term = [&](long k) {
    return LD(k) * log_quarter_z2 - log_gamma<LD>(LD(k) + 1) -
           log_gamma<LD>(LD(k) + LD(nu) + 1);
  };
  const LD log_peak = log_term(peak);
  constexpr LD kTiny = 1e-21L;

  LD sum = 1;
  LD term = 1;
  for (long k = peak; ; ++k) {
    term *= quarter_z2 / ((LD(k) + 1) * (LD(k) + 1 + LD(nu)));
    sum += term;
    if (term < kTiny * sum) {
      break;
    }
  }
  term = 1;
  for (long k = peak; k > 0; --k) {
    term *= (LD(k) * (LD(k) + LD(nu))) / quarter_z2;
    sum += term;
    if (term < kTiny * sum) {
      break;
    }
  }
  return static_cast<double>(log_peak + std::log(sum));
}

// Large-argument expansion: I_nu(z) ~ e^z / sqrt(2 pi z) sum_k (-1)^k a_k / z^k.
double log_bessel_asymptotic(double nu, double z) {
  using LD = long double;
  const LD mu = 4 * LD(nu) * LD(nu);
  LD sum = 1;
  LD term = 1;
  LD previous = kInf;
  for (int k = 1; k < 500; ++k) {
    const LD odd = 2 * LD(k) - 1;
    term *= -(mu - odd * odd) / (8 * LD(k) * LD(z));
    const LD magnitude = std::fabs(term);
    if (magnitude > previous) {
      break;  // past the optimal truncation point
    }
    sum += term;
    if (magnitude < 1e-19L * std::fabs(sum)) {
      break;
    }
    previous = magnitude;
  }
  if (!(sum > 0)) {
    throw Error(Errc::bessel_overflow, "asymptotic Bessel series lost positivity");
  }
  return static_cast<double>(LD(z) - 0.5L * std::log(2 * std::numbers::pi_v<LD> * LD(z)) +
                             std::log(sum));
}

void check_arguments(double nu, double z) {
  if (!(nu > -1.0) || !std::isfinite(nu)) {
    throw Error(Errc::invalid_argument, "Bessel order must be finite and > -1");
  }
  if (!(z >= 0.0) || !std::isfinite(z)) {
    throw Error(Errc::invalid_argument, "Bessel argument must be finite and >= 0");
  }
}

}  // namespace

double log_bessel_i_reduced(double nu, double z) {
  check_arguments(nu, z);
  if (z == 0.0) {
    return -log_gamma(nu + 1.0);
  }
  if (z < bessel_crossover(nu)) {
    return log_reduced_series(nu, z);
  }
  return log_bessel_asymptotic(nu, z) - nu * std::log(0.5 * z);
}

double log_bessel_i(double nu, double z) {
  check_arguments(nu, z);
  if (z == 0.0) {
    if (nu == 0.0) {
      return 0.0;
    }
    return nu > 0.0 ? -kInf : kInf;
  }
  if (z < bessel_crossover(nu)) {
    return nu * std::log(0.5 * z) + log_reduced_series(nu, z);
  }
  return log_bessel_asymptotic(nu, z);
}

double log_sum_exp(std::span<const double> values) {
  double top = -kInf;
  for (double v : values) {
    top = std::max(top, v);
  }
  if (top == -kInf) {
    return -kInf;
  }
  if (top == kInf) {
    return kInf;
  }
  long double sum = 0;
  for (double v : values) {
    sum += std::exp(static_cast<long double>(v - top));
  }
  return top + static_cast<double>(std::log(sum));
}

}  // namespace twinbeam::special
