#pragma once
#include <doctest.h>

#include <cmath>

#include "twinbeam/error.hpp"
#include "twinbeam/model.hpp"

#define CHECK_ERRC(expr, errc)                                   \
  do {                                                           \
    bool thrown_ = false;                                        \
    try {                                                        \
      (void)(expr);                                              \
    } catch (const twinbeam::Error& e_) {                        \
      thrown_ = true;                                            \
      CHECK_MESSAGE(e_.code() == (errc), "message: " << e_.what()); \
    }                                                            \
    CHECK_MESSAGE(thrown_, "expected " #errc);                   \
  } while (0)

namespace testing {

inline double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

// Fit of the published measurement with its quoted mode number.
inline twinbeam::TwinBeamModel published() {
  return twinbeam::TwinBeamModel::make(52.946, 50.820, 19.66, 52.2957);
}

// Classical synthetic model (K = 0.5 > 0).
inline twinbeam::TwinBeamModel synthetic() {
  return twinbeam::TwinBeamModel::make(2.0, 3.0, 4.0, std::sqrt(5.5));
}

// Small nonclassical model (K = -1.76).
inline twinbeam::TwinBeamModel small_quantum() {
  return twinbeam::TwinBeamModel::make(2.0, 2.5, 6.0, 2.6);
}

}  // namespace testing
