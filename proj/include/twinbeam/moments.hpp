#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace twinbeam {

enum class MomentLevel { photoelectron = 0, photon = 1, intensity = 2 };

std::string_view to_string(MomentLevel level) noexcept;
std::optional<MomentLevel> parse_moment_level(std::string_view text) noexcept;

/// First and second raw moments of a signal/idler pair at one level
/// (photoelectron counts m, photon numbers n, or integrated intensities W).
struct MomentSet {
  MomentLevel level = MomentLevel::photon;
  double mean1 = 0;
  double mean2 = 0;
  double second1 = 0;  // <x1^2>
  double second2 = 0;  // <x2^2>
  double cross = 0;    // <x1 x2>

  double variance1() const { return std::fma(-mean1, mean1, second1); }
  double variance2() const { return std::fma(-mean2, mean2, second2); }
  double covariance() const { return std::fma(-mean1, mean2, cross); }

  // Throws NegativeMean / NegativeVariance when the set is not a valid moment set.
  void validate() const;
};

struct ShotCounts {
  std::int64_t m1 = 0;
  std::int64_t m2 = 0;
};

struct RawCountData {
  std::vector<ShotCounts> shots;
  double eta = 1.0;
  std::optional<MomentSet> noise;  // photoelectron-level additive noise
};

/// Sample moments over all shots. Means are accumulated first, then
/// centered sums in extended precision, so that <m> ~ 1e3 with small
/// relative variance does not lose digits.
MomentSet reduce_shots(std::span<const ShotCounts> shots);
MomentSet reduce_shots(const RawCountData& data);

/// Removes statistically independent additive noise:
///   <x> = <y> - <v>
///   <x^2> = <y^2> - 2 <x><v> - <v^2>
///   <x1 x2> = <y1 y2> - <x1><v2> - <x2><v1> - <v1 v2>
MomentSet subtract_noise(const MomentSet& signal, const MomentSet& noise);

/// Photoelectron -> photon moments for detection efficiency eta.
MomentSet photoelectron_to_photon(const MomentSet& m, double eta);
/// Exact inverse of photoelectron_to_photon.
MomentSet photon_to_photoelectron(const MomentSet& n, double eta);

/// Photon -> integrated-intensity moments (normally ordered).
MomentSet photon_to_intensity(const MomentSet& n);
/// Inverse of photon_to_intensity.
MomentSet intensity_to_photon_moments(const MomentSet& w);

/// Fano factor of photocounts for a photon-number Fano factor under
/// efficiency eta: F_m = 1 + eta (F_n - 1).
double burgess_map(double fano_photon, double eta);

}  // namespace twinbeam
