#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "twinbeam/model.hpp"

namespace twinbeam {

/// A real number stored as sign and natural log of its magnitude.
struct SignedLog {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  int sign = 0;  // -1, 0, +1

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
  static SignedLog positive(double log_magnitude) { return {log_magnitude, 1}; }
};

struct JointOptions {
  // Grid bounds; chosen automatically when empty.
  std::optional<long> n1_max;
  std::optional<long> n2_max;
  // Auto grid: max(mean + sigma_span * stddev, marginal quantile with upper
  // tail below tail_mass) on each axis.
  double sigma_span = 12.0;
  double tail_mass = 1e-10;
  // Entries below (row maximum) * exp(-band_log_cutoff) are left at zero
  // instead of being evaluated. Infinity evaluates every grid point.
  double band_log_cutoff = 69.0;
  // Alternating sums (K > 0) may cancel at most this many decimal digits.
  double max_cancel_digits = 12.0;
  // Computed entries below -negative_tolerance are reported as a failure.
  double negative_tolerance = 1e-13;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct CancellationStats {
  double max_digits_lost = 0.0;
  long extended_points = 0;  // points recomputed with long double terms
  long evaluated_points = 0;
};

/// p(n1, n2) over the grid [0, n1_max] x [0, n2_max]. Each row keeps a
/// contiguous band of evaluated entries; everything outside it is zero.
class JointPhotonDistribution {
 public:
  struct Row {
    long first = 0;
    std::vector<SignedLog> entries;
  };

  JointPhotonDistribution(TwinBeamModel model, long n1_max, long n2_max, std::vector<Row> rows,
                          CancellationStats stats = {});

  const TwinBeamModel& model() const { return model_; }
  long n1_max() const { return n1_max_; }
  long n2_max() const { return n2_max_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Row& row(long n1) const;

  SignedLog log_prob(long n1, long n2) const;
  double prob(long n1, long n2) const { return log_prob(n1, n2).value(); }

  double captured_mass() const { return captured_mass_; }
  double row_mass(long n1) const;
  const CancellationStats& stats() const { return stats_; }

  // Calls fn(n1, n2, p) for every stored entry.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (long n1 = 0; n1 <= n1_max_; ++n1) {
      const Row& r = rows_[static_cast<std::size_t>(n1)];
      for (std::size_t j = 0; j < r.entries.size(); ++j) {
        fn(n1, r.first + static_cast<long>(j), r.entries[j].value());
      }
    }
  }

 private:
  TwinBeamModel model_;
  long n1_max_;
  long n2_max_;
  std::vector<Row> rows_;
  CancellationStats stats_;
  double captured_mass_ = 0.0;
};

/// Joint photon-number distribution of the multimode twin-beam model,
/// evaluated term by term in signed log space.
JointPhotonDistribution joint_pn(const TwinBeamModel& model, const JointOptions& options = {});

/// Single grid point of joint_pn.
SignedLog joint_pn_point(const TwinBeamModel& model, long n1, long n2,
                         double max_cancel_digits = 12.0);

/// Compound Mandel-Rice distribution (the K = 0 border case).
JointPhotonDistribution joint_pn_border(double b1, double b2, double modes,
                                        const JointOptions& options = {});

/// Upper grid bound for a negative-binomial marginal with the given modes
/// and per-mode mean.
long auto_grid_max(double modes, double per_mode_mean, double sigma_span, double tail_mass);

struct ConditionalDistribution {
  long n1 = 0;
  long first = 0;              // n2 of probs[0]
  std::vector<double> probs;   // normalized over the stored row
  double row_mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double fano_empirical = 0.0;
  double fano_closed_form = 0.0;
};

/// Idler distribution conditioned on n1 signal photons, with its Fano factor
/// from the normalized row and from the closed form.
ConditionalDistribution conditional(const JointPhotonDistribution& joint, long n1);

/// Closed-form conditional Fano factor
///   1 + [(1 + M/n1) a^2 - q^2] / [(1 + M/n1) a + q]
/// with a = (B2 + K)/(1 + B1) and q = -K/B1.
double conditional_fano_closed_form(const TwinBeamModel& model, long n1);

/// Limit of the closed form for n1 -> infinity: 1 + (B2 + K)/(1 + B1) + K/B1.
double conditional_fano_limit(const TwinBeamModel& model);

struct DifferenceDistribution {
  long offset = 0;  // n1 - n2 of probs[0]
  std::vector<double> probs;
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;

  double at(long n) const;
};

/// Distribution of n1 - n2 from the anti-diagonal sums of the grid.
DifferenceDistribution difference_pn(const JointPhotonDistribution& joint);

/// n1 - n2 for two independent Poisson variables with the given means.
DifferenceDistribution poisson_product_difference(double mean1, double mean2);

/// Total probability with |n1 - n2| <= width.
double diagonal_band_mass(const JointPhotonDistribution& joint, double width);

}  // namespace twinbeam
