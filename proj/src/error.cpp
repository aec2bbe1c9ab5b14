#include "twinbeam/error.hpp"

namespace twinbeam {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::empty_data: return "EmptyData";
    case Errc::negative_mean: return "NegativeMean";
    case Errc::negative_variance: return "NegativeVariance";
    case Errc::invalid_eta: return "InvalidEta";
    case Errc::level_mismatch: return "LevelMismatch";
    case Errc::negative_cross_covariance: return "NegativeCrossCovariance";
    case Errc::zero_variance: return "ZeroVariance";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::unphysical_model: return "UnphysicalModel";
    case Errc::cancellation_overflow: return "CancellationOverflow";
    case Errc::empty_row: return "EmptyRow";
    case Errc::wrong_regime: return "WrongRegime";
    case Errc::wrong_ordering: return "WrongOrdering";
    case Errc::bessel_overflow: return "BesselOverflow";
    case Errc::unsupported_model: return "UnsupportedModel";
    case Errc::insufficient_mass: return "InsufficientMass";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
    case Errc::not_converged: return "NotConverged";
  }
  return "Unknown";
}

}  // namespace twinbeam
