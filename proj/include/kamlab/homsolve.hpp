#pragma once

#include "kamlab/dioph.hpp"
#include "kamlab/qpcore.hpp"

namespace kamlab {

/// (f̂, ĝ) with f̂ even and ĝ odd under (x, t) -> (-x, -t).
struct PerturbationPair {
  QPSeries f_hat;
  QPSeries g_hat;

  /// Throws parity-violation unless the tags are (even, odd) and the
  /// coefficients honour them to 1e-12.
  void validate() const;
};

enum class TransformDirection { forward, inverse };

/// x = ξ + u, y = η + v (forward) or ξ = x + u*, η = y + v* (inverse); u odd, v even.
struct TransformPair {
  QPSeries u;
  QPSeries v;
  TransformDirection direction = TransformDirection::inverse;
};

struct HomologicalReport {
  double min_divisor = 0.0;
  /// min over solved modes of |d| |k|_∞^σ / c0; >= 1 when the certificate holds.
  double certificate_margin = 0.0;
  /// Majorant of the data outside the certificate window, which is dropped.
  double dropped = 0.0;
  int solved_modes = 0;
};

/// v*_{kl} = i ĝ_{kl} / d, v*_{00} = f̂_{00}, u*_{00} = 0, u*_{kl} = i (f̂_{kl} - v*_{kl}) / d
/// with d = ⟨k,ω⟩γ + l. Throws divisor-underflow if |d| < 1e-14 inside the window.
TransformPair solve_homological(const PerturbationPair& pert, const DiophCertificate& cert,
                                HomologicalReport* report = nullptr);

struct HomologicalResidual {
  double first = 0.0;   // ‖γ ∂x u* + ∂t u* + f̂ - v*‖
  double second = 0.0;  // ‖γ ∂x v* + ∂t v* + ĝ‖
};

/// Strip norms of both residuals on D(s, r) with r the data radius.
HomologicalResidual residual(const PerturbationPair& pert, const TransformPair& tp, double s = 0.0);

struct BesselCheck {
  double lhs = 0.0;  // max over y nodes of Σ |f_{kl}(y)|² e^{2s(|k|_1+|l|)}
  double sup = 0.0;  // majorant of sup |f| on the shell strip of width s
  double rhs = 0.0;  // 2^{m+1} sup²
};

BesselCheck bessel_check(const QPSeries& f, double s);

}  // namespace kamlab
