#include "twinbeam/quasidist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "twinbeam/error.hpp"
#include "twinbeam/parallel.hpp"
#include "twinbeam/quadrature.hpp"
#include "twinbeam/special.hpp"

namespace twinbeam {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_ordering(double s) {
  if (!(s >= -1.0 && s <= 1.0)) {
    throw Error(Errc::out_of_range, "ordering parameter must lie in [-1, 1]");
  }
}

void check_axis(const std::vector<double>& w, const char* name) {
  if (w.empty()) {
    throw Error(Errc::invalid_argument, std::string(name) + " axis is empty");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0 || (i > 0 && !(w[i] > w[i - 1]))) {
      throw Error(Errc::invalid_argument,
                  std::string(name) + " axis must be finite, nonnegative and strictly increasing");
    }
  }
}

double max_step(const std::vector<double>& w) {
  double h = 0.0;
  for (std::size_t i = 1; i < w.size(); ++i) h = std::max(h, w[i] - w[i - 1]);
  return h;
}

// Common step when the axis is uniform, otherwise 0.
double uniform_step(const std::vector<double>& w) {
  if (w.size() < 2) return 0.0;
  const double h = (w.back() - w.front()) / static_cast<double>(w.size() - 1);
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (std::fabs((w[i] - w[i - 1]) - h) > 1e-9 * h) return 0.0;
  }
  return h;
}

double sinc(double x) {
  if (std::fabs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

QuasiGrid evaluate_grid(const QuasiFunction& fn, const std::vector<double>& w1,
                        const std::vector<double>& w2, unsigned threads) {
  check_axis(w1, "W1");
  check_axis(w2, "W2");
  QuasiGrid g;
  g.model = fn.model();
  g.s = fn.s();
  g.regime = fn.regime();
  g.a_param = fn.a_param();
  g.w1 = w1;
  g.w2 = w2;
  g.values.assign(w1.size() * w2.size(), 0.0);
  parallel_for(0, static_cast<long>(w1.size()), threads, [&](long i) {
    double* row = g.values.data() + static_cast<std::size_t>(i) * w2.size();
    for (std::size_t j = 0; j < w2.size(); ++j) row[j] = fn(w1[static_cast<std::size_t>(i)], w2[j]);
  });
  if (g.regime == Regime::oscillatory) {
    g.resolved = max_step(w1) <= 0.5 * fn.zero_spacing_w1() &&
                 max_step(w2) <= 0.5 * fn.zero_spacing_w2();
  }
  return g;
}

}  // namespace

std::string_view to_string(Regime regime) noexcept {
  return regime == Regime::regular ? "regular" : "oscillatory";
}

Regime regime_for(const TwinBeamModel& model, double s) {
  check_ordering(s);
  const double ks = model.k_s(s);
  if (ks > 0.0) return Regime::regular;
  if (ks < 0.0) return Regime::oscillatory;
  throw Error(Errc::wrong_regime, "K_s = 0: the ordering sits exactly on the regime threshold");
}

double default_a_param(const TwinBeamModel& model, double s) {
  return 1.0 / std::sqrt(std::fabs(model.k_s(s)));
}

QuasiFunction::QuasiFunction(const TwinBeamModel& model, double s, Regime regime, double a)
    : model_(model), s_(s), regime_(regime), a_(a) {
  const double shift = 0.5 * (1.0 - s);
  b1s_ = model.b1 + shift;
  b2s_ = model.b2 + shift;
  k_s_ = model.k_s(s);
  nu_ = model.modes - 1.0;
  const double lg_m = special::log_gamma(model.modes);
  if (regime == Regime::regular) {
    log_norm_ = -lg_m - model.modes * std::log(k_s_);
  } else {
    log_norm_ = std::log(a_) - std::log(std::numbers::pi) - lg_m -
                0.5 * model.modes * std::log(b1s_ * b2s_);
  }
}

QuasiFunction QuasiFunction::regular(const TwinBeamModel& model, double s) {
  model.validate();
  check_ordering(s);
  if (!(model.k_s(s) > 0.0)) {
    throw Error(Errc::wrong_regime, "regular form needs K_s > 0; K_s = " +
                                        std::to_string(model.k_s(s)) + " at s = " +
                                        std::to_string(s));
  }
  return QuasiFunction(model, s, Regime::regular, 0.0);
}

QuasiFunction QuasiFunction::oscillatory(const TwinBeamModel& model, double s,
                                         std::optional<double> a_param) {
  model.validate();
  check_ordering(s);
  if (!(model.k_s(s) < 0.0)) {
    throw Error(Errc::wrong_regime, "oscillatory form needs K_s < 0; K_s = " +
                                        std::to_string(model.k_s(s)) + " at s = " +
                                        std::to_string(s));
  }
  double a = a_param.value_or(0.0);
  if (!std::isfinite(a)) {
    throw Error(Errc::invalid_argument, "sinc constant must be finite");
  }
  if (a <= 0.0) a = default_a_param(model, s);
  return QuasiFunction(model, s, Regime::oscillatory, a);
}

QuasiFunction QuasiFunction::automatic(const TwinBeamModel& model, double s,
                                       std::optional<double> a_param) {
  model.validate();
  return regime_for(model, s) == Regime::regular ? regular(model, s)
                                                 : oscillatory(model, s, a_param);
}

double QuasiFunction::log_value(double w1, double w2) const {
  if (w1 < 0.0 || w2 < 0.0) return kNegInf;
  const double prod = w1 * w2;
  double v = log_norm_ - (b2s_ * w1 + b1s_ * w2) / k_s_;
  if (nu_ != 0.0) v += nu_ * std::log(prod);
  const double z = 2.0 * model_.d12 * std::sqrt(prod) / k_s_;
  return v + special::log_bessel_i_reduced(nu_, z);
}

double QuasiFunction::operator()(double w1, double w2) const {
  if (w1 < 0.0 || w2 < 0.0) return 0.0;
  if (regime_ == Regime::regular) return std::exp(log_value(w1, w2));
  double v = log_norm_ - 0.5 * w1 / b1s_ - 0.5 * w2 / b2s_;
  if (nu_ != 0.0) v += 0.5 * nu_ * std::log(w1 * w2);
  return std::exp(v) * sinc(a_ * (b2s_ / b1s_ * w1 - w2));
}

double QuasiFunction::zero_spacing_w1() const {
  return regime_ == Regime::oscillatory ? std::numbers::pi * b1s_ / (a_ * b2s_)
                                        : std::numeric_limits<double>::infinity();
}

double QuasiFunction::zero_spacing_w2() const {
  return regime_ == Regime::oscillatory ? std::numbers::pi / a_
                                        : std::numeric_limits<double>::infinity();
}

QuasiFunction QuasiGrid::function() const {
  if (ridge_limit) {
    throw Error(Errc::wrong_regime, "a K_s = 0 grid has no pointwise quasi-distribution");
  }
  return regime == Regime::regular ? QuasiFunction::regular(model, s)
                                   : QuasiFunction::oscillatory(model, s, a_param);
}

std::vector<double> uniform_axis(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(Errc::invalid_argument, "uniform axis needs hi > lo and at least 2 points");
  }
  std::vector<double> w(static_cast<std::size_t>(points));
  const double h = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) w[static_cast<std::size_t>(i)] = lo + i * h;
  w.back() = hi;
  return w;
}

std::pair<double, double> default_extent(const TwinBeamModel& model, double s,
                                         double sigma_span) {
  check_ordering(s);
  const double shift = 0.5 * (1.0 - s);
  const double root_m = std::sqrt(model.modes);
  auto extent = [&](double bs) { return model.modes * bs + sigma_span * root_m * bs; };
  return {extent(model.b1 + shift), extent(model.b2 + shift)};
}

QuasiGrid quasi_regular(const TwinBeamModel& model, double s, const std::vector<double>& w1,
                        const std::vector<double>& w2, unsigned threads) {
  return evaluate_grid(QuasiFunction::regular(model, s), w1, w2, threads);
}

QuasiGrid quasi_oscillatory(const TwinBeamModel& model, double s, const std::vector<double>& w1,
                            const std::vector<double>& w2, std::optional<double> a_param,
                            unsigned threads) {
  return evaluate_grid(QuasiFunction::oscillatory(model, s, a_param), w1, w2, threads);
}

namespace {

// W1 ~ Gamma(M, B1s) with W2 = (B2s/B1s) W1 exactly.
QuasiGrid ridge_limit_grid(const TwinBeamModel& model, double s, std::vector<double> w1,
                           std::vector<double> w2) {
  QuasiGrid g;
  g.model = model;
  g.s = s;
  g.regime = Regime::regular;
  g.ridge_limit = true;
  const double shift = 0.5 * (1.0 - s);
  const double b1s = model.b1 + shift;
  const double ratio = (model.b2 + shift) / b1s;
  const double lg = special::log_gamma(model.modes);
  g.values.assign(w1.size() * w2.size(), 0.0);
  for (std::size_t i = 0; i < w1.size(); ++i) {
    const double x = w1[i];
    if (x <= 0.0) continue;
    const double density = std::exp((model.modes - 1.0) * std::log(x) - x / b1s - lg -
                                     model.modes * std::log(b1s));
    const double y = ratio * x;
    if (y < w2.front() || y > w2.back()) continue;
    const auto it = std::upper_bound(w2.begin(), w2.end(), y);
    const std::size_t j1 = std::min<std::size_t>(static_cast<std::size_t>(it - w2.begin()),
                                                 w2.size() - 1);
    const std::size_t j0 = j1 == 0 ? 0 : j1 - 1;
    if (j0 == j1) continue;
    // Trapezoid weights of the two nodes are (h_left + h_right)/2.
    auto node_width = [&](std::size_t j) {
      return 0.5 * ((j > 0 ? w2[j] - w2[j - 1] : 0.0) +
                    (j + 1 < w2.size() ? w2[j + 1] - w2[j] : 0.0));
    };
    const double t = (y - w2[j0]) / (w2[j1] - w2[j0]);
    g.values[i * w2.size() + j0] = density * (1.0 - t) / node_width(j0);
    g.values[i * w2.size() + j1] = density * t / node_width(j1);
  }
  g.w1 = std::move(w1);
  g.w2 = std::move(w2);
  return g;
}

}  // namespace

QuasiGrid quasi_auto(const TwinBeamModel& model, double s, const QuasiOptions& options) {
  model.validate();
  check_ordering(s);
  const double shift = 0.5 * (1.0 - s);
  if (std::fabs(model.k_s(s)) <= kRidgeTolerance * (model.b1 + shift) * (model.b2 + shift)) {
    const auto [e1, e2] = default_extent(model, s, options.sigma_span);
    return ridge_limit_grid(model, s, uniform_axis(0.0, options.w1_max.value_or(e1), options.points),
                            uniform_axis(0.0, options.w2_max.value_or(e2), options.points));
  }
  const QuasiFunction fn = QuasiFunction::automatic(model, s, options.a_param);
  const auto [e1, e2] = default_extent(model, s, options.sigma_span);
  const double hi1 = options.w1_max.value_or(e1);
  const double hi2 = options.w2_max.value_or(e2);
  return evaluate_grid(fn, uniform_axis(0.0, hi1, options.points),
                       uniform_axis(0.0, hi2, options.points), options.threads);
}

double grid_integral(const QuasiGrid& grid) {
  return integrate_grid(grid, [](double, double) { return 1.0; });
}

MomentSet grid_moments(const QuasiGrid& grid) {
  MomentSet m;
  m.level = MomentLevel::intensity;
  const double norm = grid_integral(grid);
  m.mean1 = integrate_grid(grid, [](double a, double) { return a; }) / norm;
  m.mean2 = integrate_grid(grid, [](double, double b) { return b; }) / norm;
  m.second1 = integrate_grid(grid, [](double a, double) { return a * a; }) / norm;
  m.second2 = integrate_grid(grid, [](double, double b) { return b * b; }) / norm;
  m.cross = integrate_grid(grid, [](double a, double b) { return a * b; }) / norm;
  return m;
}

double integrate_adaptive(const QuasiFunction& fn, double w1_max, double w2_max, double rel_tol,
                          int moment1, int moment2) {
  if (!(w1_max > 0.0) || !(w2_max > 0.0) || moment1 < 0 || moment2 < 0) {
    throw Error(Errc::invalid_argument, "adaptive integral needs positive extents");
  }
  auto inner = [&](double w1) {
    const double f1 = std::pow(w1, moment1);
    if (f1 == 0.0) return 0.0;
    auto g = [&](double w2) { return std::pow(w2, moment2) * fn(w1, w2); };
    return f1 * quad::gauss_adaptive(g, 0.0, w2_max, 0.1 * rel_tol);
  };
  return quad::gauss_adaptive(inner, 0.0, w1_max, rel_tol);
}

JointPhotonDistribution mandel_forward(const QuasiFunction& p1, long n1_max, long n2_max,
                                       int nodes) {
  if (std::fabs(p1.s() - 1.0) > 1e-12) {
    throw Error(Errc::wrong_ordering, "detection transform needs the s = 1 quasi-distribution");
  }
  if (p1.regime() != Regime::regular) {
    throw Error(Errc::wrong_regime, "detection transform needs a regular quasi-distribution");
  }
  if (n1_max < 0 || n2_max < 0) {
    throw Error(Errc::invalid_argument, "grid bounds must be nonnegative");
  }
  const TwinBeamModel& m = p1.model();
  const double alpha = m.modes - 1.0;
  const quad::Rule rule = quad::gauss_laguerre(nodes, alpha);
  const std::size_t n = rule.nodes.size();
  // W = x / beta puts the Laguerre weight on the marginal decay e^{-W (1 + 1/B)}.
  const double beta1 = 1.0 + 1.0 / m.b1;
  const double beta2 = 1.0 + 1.0 / m.b2;

  std::vector<double> w1(n), w2(n), log_w1(n), log_w2(n), base1(n), base2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rule.nodes[i];
    const double lw = rule.log_weights[i] + x - alpha * std::log(x);
    w1[i] = x / beta1;
    w2[i] = x / beta2;
    log_w1[i] = std::log(w1[i]);
    log_w2[i] = std::log(w2[i]);
    base1[i] = lw - std::log(beta1) - w1[i];
    base2[i] = lw - std::log(beta2) - w2[i];
  }
  std::vector<double> f(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      f[i * n + j] = base1[i] + base2[j] + p1.log_value(w1[i], w2[j]);
    }
  }

  // Stage 1 sums over W2 for every n2, stage 2 over W1 for every n1.
  std::vector<JointPhotonDistribution::Row> rows(static_cast<std::size_t>(n1_max + 1));
  for (auto& r : rows) r.entries.resize(static_cast<std::size_t>(n2_max + 1));
  std::vector<double> terms(n);
  std::vector<double> stage(n);
  for (long n2 = 0; n2 <= n2_max; ++n2) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) terms[j] = f[i * n + j] + n2 * log_w2[j];
      stage[i] = special::log_sum_exp(terms);
    }
    const double lf2 = special::log_factorial(n2);
    for (long n1 = 0; n1 <= n1_max; ++n1) {
      for (std::size_t i = 0; i < n; ++i) terms[i] = stage[i] + n1 * log_w1[i];
      const double lp = special::log_sum_exp(terms) - special::log_factorial(n1) - lf2;
      rows[static_cast<std::size_t>(n1)].entries[static_cast<std::size_t>(n2)] =
          std::isfinite(lp) ? SignedLog::positive(lp) : SignedLog{};
    }
  }
  return JointPhotonDistribution(m, n1_max, n2_max, std::move(rows));
}

JointPhotonDistribution mandel_forward(const QuasiGrid& grid, long n1_max, long n2_max,
                                       int nodes) {
  if (std::fabs(grid.s - 1.0) > 1e-12) {
    throw Error(Errc::wrong_ordering, "detection transform needs the s = 1 quasi-distribution");
  }
  return mandel_forward(grid.function(), n1_max, n2_max, nodes);
}

double DifferenceQuasi::integral() const { return quad::trapezoid(w, values); }

double DifferenceQuasi::mean() const {
  std::vector<double> y(values.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = w[i] * values[i];
  return quad::trapezoid(w, y) / integral();
}

double DifferenceQuasi::second_moment() const {
  std::vector<double> y(values.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = w[i] * w[i] * values[i];
  return quad::trapezoid(w, y) / integral();
}

double DifferenceQuasi::min_value() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

DifferenceQuasi difference_quasi(const QuasiGrid& grid) {
  const auto& w1 = grid.w1;
  const auto& w2 = grid.w2;
  check_axis(w1, "W1");
  check_axis(w2, "W2");
  DifferenceQuasi out;
  out.s = grid.s;
  const std::size_t n1 = w1.size();
  const std::size_t n2 = w2.size();
  const double h1 = uniform_step(w1);
  const double h2 = uniform_step(w2);
  const double shift = (w1.front() - w2.front()) / (h1 > 0 ? h1 : 1.0);

  if (h1 > 0 && std::fabs(h1 - h2) <= 1e-9 * h1 &&
      std::fabs(shift - std::round(shift)) <= 1e-9) {
    // Diagonal i - j = k - (n2 - 1) of a common-step grid.
    const double h = h1;
    const std::size_t count = n1 + n2 - 1;
    out.w.resize(count);
    out.values.assign(count, 0.0);
    for (std::size_t k = 0; k < count; ++k) {
      const long d = static_cast<long>(k) - static_cast<long>(n2 - 1);
      out.w[k] = w1.front() - w2.front() + d * h;
      const std::size_t j_lo = d < 0 ? static_cast<std::size_t>(-d) : 0;
      const std::size_t j_hi = std::min(n2 - 1, static_cast<std::size_t>(
                                                    static_cast<long>(n1 - 1) - d));
      long double s = 0;
      for (std::size_t j = j_lo; j <= j_hi; ++j) {
        const double v = grid.at(static_cast<std::size_t>(static_cast<long>(j) + d), j);
        s += (j == j_lo || j == j_hi) ? 0.5L * v : static_cast<long double>(v);
      }
      if (j_lo == j_hi) s *= 2;  // single point: no trapezoid halving
      out.values[k] = static_cast<double>(s * h);
    }
    return out;
  }

  // General axes: points along W2, linear interpolation in W1.
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n1; ++i) step = std::min(step, w1[i] - w1[i - 1]);
  for (std::size_t j = 1; j < n2; ++j) step = std::min(step, w2[j] - w2[j - 1]);
  const double lo = w1.front() - w2.back();
  const double hi = w1.back() - w2.front();
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
  out.w.resize(count);
  out.values.assign(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const double w = std::min(hi, lo + static_cast<double>(k) * step);
    out.w[k] = w;
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j < n2; ++j) {
      const double a = w + w2[j];
      if (a < w1.front() || a > w1.back()) continue;
      const auto it = std::upper_bound(w1.begin(), w1.end(), a);
      const std::size_t i1 = std::min<std::size_t>(static_cast<std::size_t>(it - w1.begin()), n1 - 1);
      const std::size_t i0 = i1 == 0 ? 0 : i1 - 1;
      const double t = i1 == i0 ? 0.0 : (a - w1[i0]) / (w1[i1] - w1[i0]);
      xs.push_back(w2[j]);
      ys.push_back((1.0 - t) * grid.at(i0, j) + t * grid.at(i1, j));
    }
    out.values[k] = xs.size() > 1 ? quad::trapezoid(xs, ys) : 0.0;
  }
  return out;
}

DifferenceQuasi difference_quasi_direct(const QuasiFunction& fn, const std::vector<double>& w,
                                        double w2_max, double panel_width, unsigned threads) {
  if (!(w2_max > 0.0) || !(panel_width > 0.0)) {
    throw Error(Errc::invalid_argument, "line integrals need positive extent and panel width");
  }
  for (std::size_t k = 1; k < w.size(); ++k) {
    if (!(w[k] > w[k - 1])) {
      throw Error(Errc::invalid_argument, "difference axis must be strictly increasing");
    }
  }
  const quad::Rule rule = quad::gauss_legendre(16);
  DifferenceQuasi out;
  out.s = fn.s();
  out.w = w;
  out.values.assign(w.size(), 0.0);
  parallel_for(0, static_cast<long>(w.size()), threads, [&](long k) {
    const double wk = w[static_cast<std::size_t>(k)];
    const double a = std::max(0.0, -wk);
    if (!(w2_max > a)) return;
    const int panels = std::max(1, static_cast<int>(std::ceil((w2_max - a) / panel_width)));
    out.values[static_cast<std::size_t>(k)] = quad::gauss_legendre_panels(
        [&](double v) { return fn(wk + v, v); }, a, w2_max, panels, rule);
  });
  return out;
}

}  // namespace twinbeam
