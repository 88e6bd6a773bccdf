#pragma once

#include <stdexcept>
#include <string>

namespace kamlab {

enum class ErrorKind {
  invalid_argument,
  action_out_of_range,
  frequency_mismatch,
  shift_too_large,
  resonance_detected,
  divisor_underflow,
  parity_violation,
  contraction_failure,
  divergence_detected,
  degenerate_schedule,
  fit_degenerate,
  resonant_divisor,
  orbit_escape,
  integrator_failure,
  insufficient_data,
  divisor_failure,
  zero_twist,
  missing_field,
  unknown_key,
  range_violation,
};

const char* to_string(ErrorKind kind);

/// Library-wide exception. `kind()` identifies the failure class so callers
/// (the CLI in particular) can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// True for failures that are scientific outcomes rather than misuse.
bool is_scientific_failure(ErrorKind kind);

}  // namespace kamlab
