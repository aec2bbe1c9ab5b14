#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "twinbeam/model.hpp"
#include "twinbeam/photodist.hpp"

namespace twinbeam {

enum class Regime { regular, oscillatory };

std::string_view to_string(Regime regime) noexcept;

/// regular when K_s > 0, oscillatory when K_s < 0; WrongRegime at K_s == 0,
/// where neither form applies.
Regime regime_for(const TwinBeamModel& model, double s);

/// Default sinc constant of the oscillatory approximation: 1/sqrt(|K_s|).
double default_a_param(const TwinBeamModel& model, double s);

/// Pointwise s-ordered joint intensity quasi-distribution P_s(W1, W2).
class QuasiFunction {
 public:
  /// Regular form; throws WrongRegime unless K_s > 0.
  static QuasiFunction regular(const TwinBeamModel& model, double s);
  /// Sinc approximation; throws WrongRegime unless K_s < 0. a_param <= 0 or
  /// absent selects default_a_param.
  static QuasiFunction oscillatory(const TwinBeamModel& model, double s,
                                   std::optional<double> a_param = std::nullopt);
  static QuasiFunction automatic(const TwinBeamModel& model, double s,
                                 std::optional<double> a_param = std::nullopt);

  double operator()(double w1, double w2) const;
  /// log P_s for the regular regime (W1, W2 >= 0).
  double log_value(double w1, double w2) const;

  const TwinBeamModel& model() const { return model_; }
  double s() const { return s_; }
  Regime regime() const { return regime_; }
  double a_param() const { return a_; }
  double b1s() const { return b1s_; }
  double b2s() const { return b2s_; }
  double k_s() const { return k_s_; }
  /// Spacing of the sinc zeros along W1 at fixed W2: pi B1s / (A B2s).
  double zero_spacing_w1() const;
  /// Spacing of the sinc zeros along W2 at fixed W1: pi / A.
  double zero_spacing_w2() const;

 private:
  QuasiFunction(const TwinBeamModel& model, double s, Regime regime, double a);

  TwinBeamModel model_;
  double s_;
  Regime regime_;
  double a_ = 0;
  double b1s_, b2s_, k_s_;
  double nu_;
  double log_norm_;  // constant part of log P_s
};

/// |K_s| <= kRidgeTolerance * B1s B2s counts as the regime boundary in quasi_auto.
inline constexpr double kRidgeTolerance = 1e-9;

struct QuasiOptions {
  // Axis upper ends; default M B_is + sigma_span sqrt(M) B_is.
  std::optional<double> w1_max;
  std::optional<double> w2_max;
  double sigma_span = 12.0;
  int points = 2049;  // per axis
  std::optional<double> a_param;
  unsigned threads = 0;
};

struct QuasiGrid {
  TwinBeamModel model;
  double s = 1.0;
  Regime regime = Regime::regular;
  double a_param = 0.0;  // oscillatory only
  std::vector<double> w1;
  std::vector<double> w2;
  std::vector<double> values;  // row-major, index i * w2.size() + j
  // Oscillatory grids: both steps are at most half the sinc zero spacing.
  bool resolved = true;
  // K_s = 0: all weight on the ridge W2 = (B2s/B1s) W1, deposited onto the
  // two nearest W2 nodes. No pointwise function exists for such a grid.
  bool ridge_limit = false;

  double at(std::size_t i, std::size_t j) const { return values[i * w2.size() + j]; }
  QuasiFunction function() const;
};

std::vector<double> uniform_axis(double lo, double hi, int points);

/// Default axis upper ends for the model at ordering s.
std::pair<double, double> default_extent(const TwinBeamModel& model, double s, double sigma_span);

QuasiGrid quasi_regular(const TwinBeamModel& model, double s, const std::vector<double>& w1,
                        const std::vector<double>& w2, unsigned threads = 0);
QuasiGrid quasi_oscillatory(const TwinBeamModel& model, double s, const std::vector<double>& w1,
                            const std::vector<double>& w2,
                            std::optional<double> a_param = std::nullopt, unsigned threads = 0);
/// Picks the regime from the sign of K_s and builds default axes. Within
/// kRidgeTolerance of K_s = 0 the degenerate regular limit is used.
QuasiGrid quasi_auto(const TwinBeamModel& model, double s, const QuasiOptions& options = {});

/// Trapezoid integral of g(W1, W2) P_s over the grid.
template <class G>
double integrate_grid(const QuasiGrid& grid, G&& g);
double grid_integral(const QuasiGrid& grid);
/// Intensity moments <W_i>, <W_i^2>, <W1 W2> of the grid by trapezoid sums.
MomentSet grid_moments(const QuasiGrid& grid);

/// Nested adaptive Gauss-Legendre integral of W1^moment1 W2^moment2 P_s over
/// [0, w1_max] x [0, w2_max].
double integrate_adaptive(const QuasiFunction& fn, double w1_max, double w2_max,
                          double rel_tol = 1e-10, int moment1 = 0, int moment2 = 0);

/// Photon-number distribution of the s = 1 quasi-distribution through the
/// detection transform, by a tensor generalized Gauss-Laguerre rule. Throws
/// WrongOrdering unless s == 1 and WrongRegime for oscillatory input.
JointPhotonDistribution mandel_forward(const QuasiFunction& p1, long n1_max, long n2_max,
                                       int nodes = 160);
JointPhotonDistribution mandel_forward(const QuasiGrid& grid, long n1_max, long n2_max,
                                       int nodes = 160);

struct DifferenceQuasi {
  double s = 1.0;
  std::vector<double> w;
  std::vector<double> values;

  double integral() const;
  double mean() const;
  double second_moment() const;
  double min_value() const;
};

/// P_{s,-}(W) from line sums along W1 - W2 = W. Uniform grids with a common
/// step sum along diagonals; other grids interpolate bilinearly.
DifferenceQuasi difference_quasi(const QuasiGrid& grid);

/// P_{s,-}(W) on the given points from line integrals of the pointwise
/// function (composite Gauss-Legendre, panel width at most panel_width).
DifferenceQuasi difference_quasi_direct(const QuasiFunction& fn, const std::vector<double>& w,
                                        double w2_max, double panel_width = 4.0,
                                        unsigned threads = 0);

// Implementation of the template above.
template <class G>
double integrate_grid(const QuasiGrid& grid, G&& g) {
  const std::size_t n1 = grid.w1.size();
  const std::size_t n2 = grid.w2.size();
  long double total = 0;
  for (std::size_t i = 0; i < n1; ++i) {
    const double h1 = (i > 0 ? grid.w1[i] - grid.w1[i - 1] : 0.0) +
                      (i + 1 < n1 ? grid.w1[i + 1] - grid.w1[i] : 0.0);
    long double row = 0;
    for (std::size_t j = 0; j < n2; ++j) {
      const double h2 = (j > 0 ? grid.w2[j] - grid.w2[j - 1] : 0.0) +
                        (j + 1 < n2 ? grid.w2[j + 1] - grid.w2[j] : 0.0);
      row += 0.5L * h2 * g(grid.w1[i], grid.w2[j]) * grid.at(i, j);
    }
    total += 0.5L * h1 * row;
  }
  return static_cast<double>(total);
}

}  // namespace twinbeam
