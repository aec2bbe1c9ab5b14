#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "twinbeam/error.hpp"

namespace twinbeam::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;      // may underflow to zero for far nodes
  std::vector<double> log_weights;  // always finite
};

/// Generalized Gauss-Laguerre rule for the weight x^alpha e^-x on [0, inf),
/// alpha > -1, 1 <= n <= 1000.
Rule gauss_laguerre(int n, double alpha);

/// Gauss-Legendre rule on [-1, 1], 1 <= n <= 1000.
Rule gauss_legendre(int n);

/// Integral of f over [a, b] with a composite Gauss-Legendre rule of
/// `panels` equal panels.
template <class F>
double gauss_legendre_panels(F&& f, double a, double b, int panels, const Rule& rule) {
  const double width = (b - a) / panels;
  long double total = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    long double s = 0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      s += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
    }
    total += s * 0.5 * width;
  }
  return static_cast<double>(total);
}

struct TrapezoidResult {
  double value = 0;
  int levels = 0;
  long evaluations = 0;
};

/// Trapezoid rule on [a, b] with repeated step halving until two successive
/// estimates agree to rel_tol * |value| + abs_tol. At least min_levels
/// halvings are done so narrow features are not missed by the first grid.
/// Throws NotConverged after max_levels halvings.
template <class F>
TrapezoidResult trapezoid_adaptive(F&& f, double a, double b, double rel_tol, double abs_tol,
                                   int initial_intervals = 64, int min_levels = 2,
                                   int max_levels = 18) {
  TrapezoidResult r;
  if (!(b > a)) {
    return r;
  }
  long n = initial_intervals;
  double h = (b - a) / static_cast<double>(n);
  long double sum = 0.5L * (f(a) + f(b));
  for (long i = 1; i < n; ++i) sum += f(a + static_cast<double>(i) * h);
  r.evaluations = n + 1;
  double estimate = static_cast<double>(sum * h);
  for (int level = 1; level <= max_levels; ++level) {
    long double mids = 0;
    for (long i = 0; i < n; ++i) mids += f(a + (static_cast<double>(i) + 0.5) * h);
    r.evaluations += n;
    sum += mids;
    n *= 2;
    h *= 0.5;
    const double next = static_cast<double>(sum * h);
    const bool close = std::fabs(next - estimate) <= rel_tol * std::fabs(next) + abs_tol;
    estimate = next;
    r.levels = level;
    if (close && level >= min_levels) {
      r.value = estimate;
      return r;
    }
  }
  throw Error(Errc::not_converged, "trapezoid rule did not converge after " +
                                       std::to_string(max_levels) + " halvings");
}

namespace detail {

template <class F>
double panel(F& f, double a, double b, const Rule& rule) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  long double s = 0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return static_cast<double>(s * half);
}

template <class F>
double bisect(F& f, double a, double b, double whole, double tol, int depth, const Rule& rule) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid, rule);
  const double right = panel(f, mid, b, rule);
  const double both = left + right;
  if (std::fabs(both - whole) <= tol) return both;
  if (depth == 0) {
    throw Error(Errc::not_converged, "adaptive Gauss-Legendre hit its bisection limit");
  }
  // tol / sqrt(2) rather than tol / 2 per half lets integrable endpoint
  // singularities such as sqrt(x) converge within the depth limit.
  return bisect(f, a, mid, left, M_SQRT1_2 * tol, depth - 1, rule) +
         bisect(f, mid, b, right, M_SQRT1_2 * tol, depth - 1, rule);
}

}  // namespace detail

/// Integral of f over [a, b] by recursive bisection with a 15-point
/// Gauss-Legendre rule. The error target is rel_tol times the magnitude of a
/// 32-panel first pass, split evenly over the panels; the error estimate
/// |two halves - whole| is conservative for smooth integrands.
template <class F>
double gauss_adaptive(F&& f, double a, double b, double rel_tol, int max_depth = 30) {
  static const Rule rule = gauss_legendre(15);
  if (!(b > a)) return 0.0;
  constexpr int panels = 32;
  const double width = (b - a) / panels;
  double est[panels];
  double coarse = 0;
  for (int p = 0; p < panels; ++p) {
    est[p] = detail::panel(f, a + p * width, a + (p + 1) * width, rule);
    coarse += std::fabs(est[p]);
  }
  if (coarse == 0.0) return 0.0;
  const double tol = rel_tol * coarse / panels;
  long double total = 0;
  for (int p = 0; p < panels; ++p) {
    total += detail::bisect(f, a + p * width, a + (p + 1) * width, est[p], tol, max_depth, rule);
  }
  return static_cast<double>(total);
}

/// Trapezoid rule over arbitrary strictly increasing sample points.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace twinbeam::quad
