#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace twinbeam {

// Values are part of the C ABI (tb_status); do not renumber.
enum class Errc : int {
  invalid_argument = 1,
  empty_data = 2,
  negative_mean = 3,
  negative_variance = 4,
  invalid_eta = 5,
  level_mismatch = 6,
  negative_cross_covariance = 7,
  zero_variance = 8,
  out_of_range = 9,
  unphysical_model = 10,
  cancellation_overflow = 11,
  empty_row = 12,
  wrong_regime = 13,
  wrong_ordering = 14,
  bessel_overflow = 15,
  unsupported_model = 16,
  insufficient_mass = 17,
  parse_error = 18,
  io_error = 19,
  not_converged = 20,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::optional<long> line = std::nullopt)
      : std::runtime_error(message), code_(code), line_(line) {}

  Errc code() const noexcept { return code_; }
  // Input line number for parse errors (1-based), when known.
  std::optional<long> line() const noexcept { return line_; }

 private:
  Errc code_;
  std::optional<long> line_;
};

}  // namespace twinbeam
