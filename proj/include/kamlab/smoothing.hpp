#pragma once

#include <vector>

#include "kamlab/qpcore.hpp"

namespace kamlab {

/// Radial cutoff χ with χ = 1 on [0, a/2], χ = 0 on [a, ∞) and an exp(-1/x)
/// glue in between.
struct KernelProfile {
  double a = 1.0;

  double operator()(double rho) const;
  /// Physical-space kernel K(w) = (1/π) ∫_0^a χ(ξ) cos(ξ w) dξ for one frequency variable.
  double kernel(double w, int nodes = 4000) const;
};

/// ε_n = ε^{(1+μ̃)^n}, s_n = ε_n^{1/p}, r_n = s_n^{m+1+μ/10}, p = 2m+1+μ,
/// μ̃ = μ / (100 (2σ+1+μ)).
struct SmoothingSchedule {
  double epsilon = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  int m = 1;
  double p = 0.0;
  double mu_tilde = 0.0;
  std::vector<double> eps_n;
  std::vector<double> s_n;
  std::vector<double> r_n;

  /// Throws degenerate-schedule if s_0 > 1/2.
  static SmoothingSchedule make(double epsilon, double mu, int m, double sigma, int n_max);
};

/// Multiplies the (k,l) coefficient by χ(δ ‖(⟨k,ω⟩, l)‖₂).
QPSeries smooth(const QPSeries& f, double delta, const KernelProfile& kernel = {});

/// [f_0, ..., f_N] with f_0 = S_{s_0} f and f_n = S_{s_n} f - S_{s_{n-1}} f.
std::vector<QPSeries> dyadic_decompose(const QPSeries& f, const SmoothingSchedule& sched, int n,
                                       const KernelProfile& kernel = {});

/// Lacunary probe Σ_{j=0}^{J} 2^{-p j} cos(2^j x), Hölder exponent p.
struct LacunaryProbe {
  double p = 1.0;
  int terms = 40;

  double value(double x) const;
  double smoothed(double x, double delta, const KernelProfile& kernel) const;
  /// max over a uniform grid of [0, 2π) (which includes x = 0) of |S_δ f - f|.
  double sup_error(double delta, const KernelProfile& kernel, int grid = 4096) const;
};

struct DecayProbeResult {
  std::vector<double> deltas;
  std::vector<double> errors;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares slope of log sup|S_δ f - f| against log δ. Throws
/// fit-degenerate with fewer than 4 deltas or a vanishing error.
DecayProbeResult error_decay_probe(double p_test, const std::vector<double>& deltas,
                                   const KernelProfile& kernel = {});

}  // namespace kamlab
