#pragma once

#include <string>

#include "twinbeam/moments.hpp"

namespace twinbeam {

/// Multimode twin-beam model: M equally populated modes, B1 and B2 mean
/// photons per mode in signal and idler, |D12| the per-mode pair correlation.
struct TwinBeamModel {
  double b1 = 0;
  double b2 = 0;
  double modes = 0;
  double d12 = 0;
  // Per-arm mode estimates from the fit; diagnostic only.
  double m1_modes = 0;
  double m2_modes = 0;

  /// Builds a model with m1_modes = m2_modes = modes. Throws InvalidArgument
  /// unless b1, b2, modes > 0 and d12 >= 0.
  static TwinBeamModel make(double b1, double b2, double modes, double d12);

  void validate() const;

  /// K = B1 B2 - |D12|^2.
  double k() const { return b1 * b2 - d12 * d12; }
  /// K_s with B_is = B_i + (1 - s)/2.
  double k_s(double s) const;

  /// B_i + K clamped to zero within the physicality slack. These are the
  /// per-mode means of the unpaired ("fictitious noise") contributions.
  double noise1() const;
  double noise2() const;

  /// K + min(B1, B2) >= -1e-9 * max(B1, B2).
  bool physical() const;
  /// Throws UnphysicalModel when !physical().
  void require_physical() const;
};

enum class ModePolicyKind { mean, arm1, arm2, explicit_value };

struct ModePolicy {
  ModePolicyKind kind = ModePolicyKind::mean;
  double value = 0;  // used by explicit_value

  static ModePolicy mean() { return {}; }
  static ModePolicy arm1() { return {ModePolicyKind::arm1, 0}; }
  static ModePolicy arm2() { return {ModePolicyKind::arm2, 0}; }
  static ModePolicy explicit_modes(double m) { return {ModePolicyKind::explicit_value, m}; }
};

/// Parses "mean", "arm1", "arm2" or "explicit" (value supplied separately).
ModePolicy parse_mode_policy(const std::string& name, double explicit_value);
std::string to_string(const ModePolicy& policy);

/// Inverts intensity moments into model parameters:
///   B_i = var(W_i)/<W_i>, M_i = <W_i>^2/var(W_i), |D12| = sqrt(cov(W1,W2)/M).
TwinBeamModel fit(const MomentSet& intensity, ModePolicy policy = ModePolicy::mean());

/// Intensity moments implied by the model with its common M:
///   <W_i> = M B_i, var(W_i) = M B_i^2, cov(W1, W2) = M |D12|^2.
MomentSet forward_moments(const TwinBeamModel& model);

double determinant_k(const TwinBeamModel& model);
double determinant_k_s(const TwinBeamModel& model, double s);

/// Ordering parameter at which K_s = 0:
///   s_th = 1 + B1 + B2 - sqrt((B1 + B2)^2 - 4K).
/// Throws OutOfRange when the value falls outside [-1, 1] by more than 1e-12.
double threshold_ordering(const TwinBeamModel& model);

/// Model-based variance of W1 - W2: M (B1^2 + B2^2 - 2|D12|^2).
double difference_intensity_variance(const TwinBeamModel& model);

/// Two-mode principal squeeze variance 1 + B1 + B2 - 2|D12|.
double principal_squeeze_variance(const TwinBeamModel& model);

struct NonclassicalityReport {
  double k = 0;
  double s_th = 0;
  double lambda = 0;
  // Sub-shot-noise coefficient: model-based (default) and from raw moments.
  double r = 0;
  double r_raw = 0;
  double var_w_diff = 0;
  double var_w_diff_raw = 0;
  // Photon-number correlation coefficient: from model-regenerated photon
  // variances (default) and from the raw photon moments.
  double c = 0;
  double c_raw = 0;
  // B1 B2 < |D12|^2 (K < 0): the field cannot be described classically.
  bool lower_bound_holds = false;
  // |D12|^2 < B1 B2 + min(B1, B2): B_i + K > 0.
  bool upper_bound_holds = false;
  // (B1^2 + B2^2)/2 < |D12|^2, needed for var(W1 - W2) < 0.
  bool sub_shot_noise_bound_holds = false;
  // max(B) <= min(B) + sqrt(2 min(B)).
  bool mode_bound_ok = false;
  bool physical = false;

  // "nonclassical", "classical" or "unphysical".
  std::string verdict() const;
};

/// Evaluates every certificate; never throws for a valid model.
NonclassicalityReport nonclassicality_report(const TwinBeamModel& model,
                                             const MomentSet& photon);

}  // namespace twinbeam
