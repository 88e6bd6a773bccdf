#pragma once

#include <vector>

#include "kamlab/qpcore.hpp"

namespace kamlab {

struct DiophShell {
  int k_abs = 0;            // |k|_∞ of the shell
  double min_divisor = 0;   // smallest |⟨k,ω⟩γ + l| in the shell
  double c0_running = 0;    // running minimum of |divisor| |k|^σ up to this shell
};

struct DiophCertificate {
  double c0 = 0.0;
  double sigma = 0.0;
  int k_checked = 0;
  /// Only the nearest integer l is examined for each k; every other l has divisor >= 1/2.
  int l_window = 1;
  FourierIndex worst;
  double worst_divisor = 0.0;
  std::vector<DiophShell> shells;

  /// c0 / |k|^σ, the certified lower bound for a divisor with |k|_∞ = k_abs.
  double lower_bound(int k_abs) const;
  bool covers(int k_abs) const { return k_abs <= k_checked; }
};

/// Exhaustive scan over 0 < |k|_∞ <= k_max. Throws resonance-detected when a
/// divisor falls below 1e-14; the reported k is the smallest such shell.
DiophCertificate certify(const FrequencyData& freq, double sigma, int k_max);

/// Σ 1/|⟨k,ω⟩γ + l|² over k != 0 and |k|_1 + |l| <= nu.
double divisor_sum(const FrequencyData& freq, int nu);

/// (π²/8) 3^{m+3} c0^{-2} ν^{2σ}.
double divisor_sum_bound(int m, double c0, double sigma, int nu);

}  // namespace kamlab
