#pragma once

#include <string>
#include <vector>

#include "kamlab/dioph.hpp"
#include "kamlab/homsolve.hpp"
#include "kamlab/qpcore.hpp"
#include "kamlab/smoothing.hpp"

namespace kamlab {

/// The smoothing schedule plus τ_n = ε^{-(1+μ̃)^{n-1}(1+m/p)μ̃} and the sub-grid
/// s_n^j = s_n - j/(100p) (s_n - s_{n+1}), likewise r_n^j.
struct IterationSchedule {
  SmoothingSchedule base;
  std::vector<double> tau_n;

  int n_max() const { return static_cast<int>(base.eps_n.size()) - 2; }
  double eps(int n) const { return base.eps_n.at(static_cast<std::size_t>(n)); }
  double s(int n) const { return base.s_n.at(static_cast<std::size_t>(n)); }
  double r(int n) const { return base.r_n.at(static_cast<std::size_t>(n)); }
  double tau(int n) const { return tau_n.at(static_cast<std::size_t>(n)); }
  double s_sub(int n, double j) const;
  double r_sub(int n, double j) const;
};

/// Sequences are filled for n <= n_max + 1. σ defaults to m + μ/100.
IterationSchedule schedule(double epsilon, double mu, int m, int n_max, double sigma = 0.0);

struct InversionReport {
  int sweeps = 0;
  /// max over grid points of |u*(x,y,t) + u(ξ,η,t)| at the solved preimages.
  double compatibility = 0.0;
  double analysis_tail = 0.0;
  double parity_u = 0.0;
  double parity_v = 0.0;
};

/// Inverts ξ = x + u*(x,y,t), η = y + v*(x,y,t) into x = ξ + u, y = η + v on
/// the action radius r by fixed-point sweeps at the collocation points. Throws
/// contraction-failure if ∂u*, ∂v* are not below 1/2 or after 100 sweeps.
TransformPair invert_transform(const TransformPair& inv, double r, InversionReport* report = nullptr);

struct StepDiagnostics {
  int n = 0;
  double s = 0.0;  // D(s_{n+1}, r_{n+1}), where the outputs are measured
  double r = 0.0;
  double norm_f_bar = 0.0;
  double norm_g_bar = 0.0;
  double norm_u = 0.0;
  double norm_v = 0.0;
  double norm_u_star = 0.0;
  double norm_v_star = 0.0;
  double norm_incoming = 0.0;
  // Parity residuals of the raw re-expansions, before projection.
  double parity_f = 0.0;
  double parity_g = 0.0;
  double parity_u = 0.0;
  double parity_v = 0.0;
  double min_divisor = 0.0;
  double certificate_margin = 0.0;
  double dropped = 0.0;
  int inversion_sweeps = 0;
  double compatibility = 0.0;
  double compose_residual = 0.0;
  double c_f = 0.0;  // ‖f̄_{n+1}‖ / (ε ε_n)
  double c_g = 0.0;  // ‖ḡ_{n+1}‖ / (ε ε_n s_n^m)
  bool estimate_warning = false;
};

struct IterationState {
  int n = 0;
  PerturbationPair pert;  // (f̄_n, ḡ_n) on radius r_n
  QPSeries U;             // Φ_n(ξ,η,t) = (ξ + U, η + V)
  QPSeries V;
  std::vector<TransformPair> chain;  // ΔΦ_1 .. ΔΦ_n, forward direction
  std::vector<StepDiagnostics> history;
  std::vector<std::string> warnings;

  static IterationState initial(const FrequencyData& freq, const Truncation& trunc, double r0);
};

struct KamOptions {
  ComposeOptions compose;
  /// Empirical constants above this bound are logged as estimate warnings.
  double c_warn = 1e3;
};

/// One iteration step consuming the incoming piece (f_n, g_n).
IterationState kam_step(const IterationState& state, const PerturbationPair& incoming,
                        const DiophCertificate& cert, const IterationSchedule& sched,
                        const KamOptions& opt = {});

/// (ξ,η,t) -> (∂Φ)^{-1}(f, g)∘Φ for Φ = (ξ + U, η + V), on U's radius.
PerturbationPair pullback(const PerturbationPair& in, const QPSeries& U, const QPSeries& V,
                          const ComposeOptions& opt = {}, double* residual = nullptr);

/// max over sample points of |Φ_N - ΔΦ_1∘...∘ΔΦ_N|, points on a uniform
/// (x, y, t) lattice inside D(0, r_N).
double composition_consistency(const IterationState& state, int samples_per_axis = 7);

struct InvariantCurve {
  QPSeries X;  // ψ(x,t) - (x, 0) = (U(x,0,t), V(x,0,t)), degree 0 in y
  QPSeries Y;
  double gamma = 0.0;     // rotation of the normal form on η = 0
  double deviation = 0.0;  // max of the strip norms of X and Y
};

struct RunConfig {
  double epsilon = 1e-3;
  double mu = 0.01;
  double sigma = 0.0;  // 0: m + μ/100
  int n_max = 8;
  double target = 1e-12;
  KamOptions options;
  KernelProfile kernel;
};

struct RunResult {
  InvariantCurve curve;
  IterationState state;
  IterationSchedule sched;
  bool converged = false;
};

/// Full iteration: dyadic decomposition, kam_step until ‖f̄_n‖ < target or
/// n_max, then ψ = Φ_N(·, 0, ·). Throws divergence-detected after two
/// consecutive increases of ‖f̄_n‖.
RunResult run(const PerturbationPair& initial, const DiophCertificate& cert, const RunConfig& config);

/// ψ(x, t) in physical coordinates.
std::pair<double, double> eval_curve(const InvariantCurve& c, double x, double t);

struct Precondition {
  YPoly h;
  QPSeries u;
  QPSeries v;
  double r1 = 0.0;    // majorant of u(x+γ) - u(x) + l1 - h
  double r2 = 0.0;    // majorant of v(x+γ) - v(x) + l2
  double tail1 = 0.0;  // majorant of the l1 modes with |k|_∞ >= N
  double tail2 = 0.0;  // same for l2
  double symmetry_residual = 0.0;
  double min_divisor = 0.0;
  /// min of h' over a grid of [-r, r].
  double min_twist = 0.0;
};

/// Averaging change for x1 = x + γ + δ(l1 + f), y1 = y + δ(l2 + g). l1, l2 are
/// x-only series; modes 0 < |k|_∞ < N are solved. Throws resonant-divisor if
/// |e^{i⟨k,ω⟩γ} - 1| < 1e-12 and parity-violation if l2 has a nonzero mean.
Precondition small_twist_precondition(const QPSeries& l1, const QPSeries& l2, double gamma, int N);

}  // namespace kamlab
