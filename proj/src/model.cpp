#include "twinbeam/model.hpp"

#include <algorithm>
#include <cmath>

#include "twinbeam/error.hpp"

namespace twinbeam {
namespace {

constexpr double kPhysicalSlack = 1e-9;
constexpr double kThresholdSlack = 1e-12;

}  // namespace

TwinBeamModel TwinBeamModel::make(double b1, double b2, double modes, double d12) {
  TwinBeamModel m{b1, b2, modes, d12, modes, modes};
  m.validate();
  return m;
}

void TwinBeamModel::validate() const {
  const bool finite = std::isfinite(b1) && std::isfinite(b2) && std::isfinite(modes) &&
                      std::isfinite(d12);
  if (!finite || !(b1 > 0.0) || !(b2 > 0.0) || !(modes > 0.0) || !(d12 >= 0.0)) {
    throw Error(Errc::invalid_argument,
                "model requires b1, b2, modes > 0 and d12 >= 0 (all finite)");
  }
}

double TwinBeamModel::k_s(double s) const {
  const double shift = 0.5 * (1.0 - s);
  return (b1 + shift) * (b2 + shift) - d12 * d12;
}

double TwinBeamModel::noise1() const {
  const double v = b1 + k();
  return std::fabs(v) <= kPhysicalSlack * std::max(b1, b2) ? 0.0 : std::max(v, 0.0);
}

double TwinBeamModel::noise2() const {
  const double v = b2 + k();
  return std::fabs(v) <= kPhysicalSlack * std::max(b1, b2) ? 0.0 : std::max(v, 0.0);
}

bool TwinBeamModel::physical() const {
  return k() + std::min(b1, b2) >= -kPhysicalSlack * std::max(b1, b2);
}

void TwinBeamModel::require_physical() const {
  validate();
  if (!physical()) {
    throw Error(Errc::unphysical_model,
                "model violates K + min(B1, B2) >= 0 (|D12|^2 too large for B1, B2)");
  }
}

ModePolicy parse_mode_policy(const std::string& name, double explicit_value) {
  if (name == "mean") return ModePolicy::mean();
  if (name == "arm1") return ModePolicy::arm1();
  if (name == "arm2") return ModePolicy::arm2();
  if (name == "explicit") {
    if (!(explicit_value > 0.0)) {
      throw Error(Errc::invalid_argument, "explicit mode policy needs a positive mode number");
    }
    return ModePolicy::explicit_modes(explicit_value);
  }
  throw Error(Errc::invalid_argument, "unknown mode policy '" + name + "'");
}

std::string to_string(const ModePolicy& policy) {
  switch (policy.kind) {
    case ModePolicyKind::mean: return "mean";
    case ModePolicyKind::arm1: return "arm1";
    case ModePolicyKind::arm2: return "arm2";
    case ModePolicyKind::explicit_value: return "explicit";
  }
  return "unknown";
}

TwinBeamModel fit(const MomentSet& intensity, ModePolicy policy) {
  if (intensity.level != MomentLevel::intensity) {
    throw Error(Errc::level_mismatch, "fit expects intensity-level moments");
  }
  intensity.validate();
  const double var1 = intensity.variance1();
  const double var2 = intensity.variance2();
  const double cov = intensity.covariance();
  if (!(var1 > 0.0) || !(var2 > 0.0)) {
    throw Error(Errc::zero_variance, "intensity variances must be positive");
  }
  if (cov < 0.0) {
    throw Error(Errc::negative_cross_covariance,
                "intensity cross-covariance is negative; beams are not pair-correlated");
  }
  TwinBeamModel m;
  m.b1 = var1 / intensity.mean1;
  m.b2 = var2 / intensity.mean2;
  m.m1_modes = intensity.mean1 * intensity.mean1 / var1;
  m.m2_modes = intensity.mean2 * intensity.mean2 / var2;
  switch (policy.kind) {
    case ModePolicyKind::mean: m.modes = 0.5 * (m.m1_modes + m.m2_modes); break;
    case ModePolicyKind::arm1: m.modes = m.m1_modes; break;
    case ModePolicyKind::arm2: m.modes = m.m2_modes; break;
    case ModePolicyKind::explicit_value:
      if (!(policy.value > 0.0)) {
        throw Error(Errc::invalid_argument, "explicit mode number must be positive");
      }
      m.modes = policy.value;
      break;
  }
  m.d12 = std::sqrt(cov / m.modes);
  m.validate();
  return m;
}

MomentSet forward_moments(const TwinBeamModel& model) {
  model.validate();
  MomentSet w;
  w.level = MomentLevel::intensity;
  w.mean1 = model.modes * model.b1;
  w.mean2 = model.modes * model.b2;
  // fma keeps the squared means exact before the single rounding.
  w.second1 = std::fma(w.mean1, w.mean1, model.modes * model.b1 * model.b1);
  w.second2 = std::fma(w.mean2, w.mean2, model.modes * model.b2 * model.b2);
  w.cross = std::fma(w.mean1, w.mean2, model.modes * model.d12 * model.d12);
  return w;
}

double determinant_k(const TwinBeamModel& model) { return model.k(); }

double determinant_k_s(const TwinBeamModel& model, double s) {
  if (!(s >= -1.0 && s <= 1.0)) {
    throw Error(Errc::out_of_range, "ordering parameter must lie in [-1, 1]");
  }
  return model.k_s(s);
}

namespace {
double unchecked_threshold(const TwinBeamModel& m) {
  const double sum = m.b1 + m.b2;
  const double diff = m.b1 - m.b2;
  // (B1 + B2)^2 - 4K == (B1 - B2)^2 + 4|D12|^2, which avoids cancellation.
  const double root = std::sqrt(diff * diff + 4.0 * m.d12 * m.d12);
  return 1.0 + sum - root;
}
}  // namespace

double threshold_ordering(const TwinBeamModel& model) {
  model.validate();
  const double s_th = unchecked_threshold(model);
  if (s_th < -1.0 - kThresholdSlack || s_th > 1.0 + kThresholdSlack) {
    throw Error(Errc::out_of_range,
                "threshold ordering " + std::to_string(s_th) + " lies outside [-1, 1]");
  }
  return std::clamp(s_th, -1.0, 1.0);
}

double difference_intensity_variance(const TwinBeamModel& m) {
  return m.modes * (m.b1 * m.b1 + m.b2 * m.b2 - 2.0 * m.d12 * m.d12);
}

double principal_squeeze_variance(const TwinBeamModel& m) {
  return 1.0 + m.b1 + m.b2 - 2.0 * m.d12;
}

std::string NonclassicalityReport::verdict() const {
  if (!physical) {
    return "unphysical";
  }
  return lower_bound_holds ? "nonclassical" : "classical";
}

NonclassicalityReport nonclassicality_report(const TwinBeamModel& model,
                                             const MomentSet& photon) {
  model.validate();
  if (photon.level != MomentLevel::photon) {
    throw Error(Errc::level_mismatch, "report expects photon-level moments");
  }
  NonclassicalityReport r;
  const double b1 = model.b1;
  const double b2 = model.b2;
  const double d2 = model.d12 * model.d12;

  r.k = model.k();
  // Outside [-1, 1] the ordering never crosses K_s = 0; clamp to the range.
  r.s_th = std::clamp(unchecked_threshold(model), -1.0, 1.0);
  r.lambda = principal_squeeze_variance(model);

  const double shot_noise = photon.mean1 + photon.mean2;
  r.var_w_diff = difference_intensity_variance(model);
  r.r = (shot_noise + r.var_w_diff) / shot_noise;
  const double wvar1 = photon.variance1() - photon.mean1;
  const double wvar2 = photon.variance2() - photon.mean2;
  r.var_w_diff_raw = wvar1 + wvar2 - 2.0 * photon.covariance();
  r.r_raw = (shot_noise + r.var_w_diff_raw) / shot_noise;

  const double mb1 = model.modes * b1;
  const double mb2 = model.modes * b2;
  const double nvar1 = mb1 + mb1 * b1;
  const double nvar2 = mb2 + mb2 * b2;
  r.c = model.modes * d2 / std::sqrt(nvar1 * nvar2);
  r.c_raw = photon.covariance() / std::sqrt(photon.variance1() * photon.variance2());

  r.lower_bound_holds = b1 * b2 < d2;
  r.physical = model.physical();
  r.upper_bound_holds = r.physical;
  r.sub_shot_noise_bound_holds = 0.5 * (b1 * b1 + b2 * b2) < d2;
  const double hi = std::max(b1, b2);
  const double lo = std::min(b1, b2);
  r.mode_bound_ok = hi <= lo + std::sqrt(2.0 * lo);
  return r;
}

}  // namespace twinbeam
