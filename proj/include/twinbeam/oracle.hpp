#pragma once

#include <cstdint>

#include "twinbeam/model.hpp"
#include "twinbeam/moments.hpp"
#include "twinbeam/photodist.hpp"

namespace twinbeam {

struct SimConfig {
  TwinBeamModel model;
  double eta = 1.0;
  long shots = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Shots are generated in fixed chunks with per-chunk seeds, so output does
/// not depend on the thread count.
inline constexpr long kShotChunk = 65536;

/// Draws photon pairs from the model and thins them with efficiency eta.
///
/// n1 ~ Poisson(Gamma(M, B1)); given n1, n2 = Binomial(n1, -K/B1) +
/// Poisson(Gamma(n1 + M, (B2 + K)/(1 + B1))). This reproduces the joint
/// photon-number distribution exactly, not just its moments. Each photon is
/// then detected independently with probability eta.
/// Throws UnsupportedModel for K > 0 or B_i + K < 0.
RawCountData sample_shots(const SimConfig& config);

/// Raw moments sum_n n^a p(n) over the grid. Throws InsufficientMass when
/// the captured mass is below 1 - 1e-6.
MomentSet brute_moments(const JointPhotonDistribution& joint);

struct BatchFit {
  TwinBeamModel model;       // fit of the full data set
  TwinBeamModel std_error;   // batch standard errors of each field
  long batches = 0;
};

/// Fits the full data set and estimates standard errors from the spread of
/// fits to `batches` contiguous batches.
BatchFit fit_with_batch_errors(const RawCountData& data, ModePolicy policy, long batches = 100);

/// Total-variation distance between the shot histogram and the grid
/// distribution after pooling both into square bins of `bin` photons.
/// Counts outside the grid are compared against zero probability.
double binned_tv_distance(const RawCountData& data, const JointPhotonDistribution& joint,
                          long bin = 1);

}  // namespace twinbeam
