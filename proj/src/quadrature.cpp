#include "twinbeam/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

#include "twinbeam/special.hpp"

namespace twinbeam::quad {
namespace {

using LD = long double;

void check_order(int n) {
  if (n < 1 || n > 1000) {
    throw Error(Errc::invalid_argument, "quadrature order must lie in [1, 1000]");
  }
}

// Eigenvalues of the symmetric tridiagonal Jacobi matrix, ascending.
std::vector<double> jacobi_eigenvalues(const Eigen::VectorXd& diag, const Eigen::VectorXd& sub) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::not_converged, "tridiagonal eigenvalue solver failed");
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

// L_n^alpha(x) and L_{n-1}^alpha(x) by the three-term recurrence.
std::pair<LD, LD> laguerre(int n, LD alpha, LD x) {
  LD prev = 1;
  LD cur = 1 + alpha - x;
  if (n == 0) return {prev, 0};
  for (int k = 1; k < n; ++k) {
    const LD next = ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

std::pair<LD, LD> legendre(int n, LD x) {
  LD prev = 1;
  LD cur = x;
  if (n == 0) return {prev, 0};
  for (int k = 1; k < n; ++k) {
    const LD next = ((2 * k + 1) * x * cur - k * prev) / (k + 1);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

}  // namespace

Rule gauss_laguerre(int n, double alpha) {
  check_order(n);
  if (!(alpha > -1.0) || !std::isfinite(alpha)) {
    throw Error(Errc::invalid_argument, "Laguerre alpha must be finite and > -1");
  }
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) {
    diag(i) = 2.0 * i + alpha + 1.0;
    if (i + 1 < n) sub(i) = std::sqrt((i + 1.0) * (i + 1.0 + alpha));
  }
  const auto guess = jacobi_eigenvalues(diag, sub);

  Rule rule;
  const LD a = alpha;
  const LD log_const = special::log_gamma<LD>(n + a + 1) - special::log_gamma<LD>(n + LD(1)) -
                       2 * std::log(LD(n) + 1);
  for (int i = 0; i < n; ++i) {
    LD x = guess[static_cast<std::size_t>(i)];
    for (int it = 0; it < 8; ++it) {
      const auto [ln, lm] = laguerre(n, a, x);
      const LD deriv = (n * ln - (n + a) * lm) / x;
      const LD dx = ln / deriv;
      x -= dx;
      if (std::fabs(dx) <= 1e-18L * x) break;
    }
    const LD ln1 = laguerre(n + 1, a, x).first;
    const LD lw = log_const + std::log(x) - 2 * std::log(std::fabs(ln1));
    rule.nodes.push_back(static_cast<double>(x));
    rule.log_weights.push_back(static_cast<double>(lw));
    rule.weights.push_back(static_cast<double>(std::exp(lw)));
  }
  return rule;
}

Rule gauss_legendre(int n) {
  check_order(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  const auto guess = jacobi_eigenvalues(diag, sub);

  Rule rule;
  for (int i = 0; i < n; ++i) {
    LD x = guess[static_cast<std::size_t>(i)];
    LD deriv = 1;
    for (int it = 0; it < 8; ++it) {
      const auto [pn, pm] = legendre(n, x);
      deriv = n * (x * pn - pm) / (x * x - 1);
      const LD dx = pn / deriv;
      x -= dx;
      if (std::fabs(dx) <= 1e-19L) break;
    }
    const auto [pn, pm] = legendre(n, x);
    deriv = n * (x * pn - pm) / (x * x - 1);
    const LD w = 2 / ((1 - x * x) * deriv * deriv);
    rule.nodes.push_back(static_cast<double>(x));
    rule.weights.push_back(static_cast<double>(w));
    rule.log_weights.push_back(static_cast<double>(std::log(w)));
  }
  return rule;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw Error(Errc::invalid_argument, "trapezoid needs equally long x and y");
  }
  long double s = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    s += 0.5L * (x[i] - x[i - 1]) * (static_cast<LD>(y[i]) + y[i - 1]);
  }
  return static_cast<double>(s);
}

}  // namespace twinbeam::quad
