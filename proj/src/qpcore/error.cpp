#include "kamlab/error.hpp"

namespace kamlab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::action_out_of_range: return "action-out-of-range";
    case ErrorKind::frequency_mismatch: return "frequency-mismatch";
    case ErrorKind::shift_too_large: return "shift-too-large";
    case ErrorKind::resonance_detected: return "resonance-detected";
    case ErrorKind::divisor_underflow: return "divisor-underflow";
    case ErrorKind::parity_violation: return "parity-violation";
    case ErrorKind::contraction_failure: return "contraction-failure";
    case ErrorKind::divergence_detected: return "divergence-detected";
    case ErrorKind::degenerate_schedule: return "degenerate-schedule";
    case ErrorKind::fit_degenerate: return "fit-degenerate";
    case ErrorKind::resonant_divisor: return "resonant-divisor";
    case ErrorKind::orbit_escape: return "orbit-escape";
    case ErrorKind::integrator_failure: return "integrator-failure";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::divisor_failure: return "divisor-failure";
    case ErrorKind::zero_twist: return "zero-twist";
    case ErrorKind::missing_field: return "missing-field";
    case ErrorKind::unknown_key: return "unknown-key";
    case ErrorKind::range_violation: return "range-violation";
  }
  return "unknown";
}

bool is_scientific_failure(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::resonance_detected:
    case ErrorKind::divisor_underflow:
    case ErrorKind::contraction_failure:
    case ErrorKind::divergence_detected:
    case ErrorKind::resonant_divisor:
    case ErrorKind::orbit_escape:
    case ErrorKind::integrator_failure:
    case ErrorKind::divisor_failure:
    case ErrorKind::zero_twist:
    case ErrorKind::shift_too_large:
    case ErrorKind::fit_degenerate:
      return true;
    default:
      return false;
  }
}

}  // namespace kamlab
