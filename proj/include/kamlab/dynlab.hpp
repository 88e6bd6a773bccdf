#pragma once

// Reversible maps, flow section maps and the forced oscillator laboratory.

#include <string>
#include <utility>
#include <vector>

#include "kamlab/dioph.hpp"
#include "kamlab/qpcore.hpp"

namespace kamlab {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Real part of a real series, summed over its nonzero conjugate pairs only.
class SparseSeries {
 public:
  SparseSeries() = default;
  explicit SparseSeries(const QPSeries& f);

  double operator()(double x, double y, double t = 0.0) const;
  std::size_t terms() const { return terms_.size(); }

 private:
  struct Term {
    double kdot;
    int l;
    double weight;  // 2 for a conjugate pair, 1 for the mean mode
    std::vector<cplx> cheb;
  };
  std::vector<Term> terms_;
  double radius_ = 1.0;
};

// ---------------------------------------------------------------- maps

enum class MapFamily { M, M1, M2, M_delta };

const char* to_string(MapFamily f);
MapFamily map_family_from_string(const std::string& s);

/// Reversible maps built as L = A∘B∘A with the half twist A(x,y) = (x + (γ + δh(y))/2, y)
/// and the kick B(x,y) = (x, y + δ b(x)), b odd. M has δ = 1 and h(y) = y, M1 keeps
/// h(y) = y, M2 takes a general h. M_δ is Φ0^{-1}∘L∘Φ0 with Φ0 = (x + δu0, y + δv0),
/// u0 odd and v0 even, which produces angle-dependent l1, l2.
struct ReversibleMapSpec {
  MapFamily family = MapFamily::M;
  double gamma = 0.0;
  double delta = 1.0;
  YPoly twist;   // h(y); ignored for M and M1
  QPSeries kick;  // b(x): x-only, odd
  QPSeries u0;   // M_δ only
  QPSeries v0;
  double radius = 1.0;  // action domain |y| <= radius

  /// Throws parity-violation for a kick that is not odd or a conjugation
  /// without the (odd, even) parities; invalid-argument for inconsistent data.
  void validate() const;
};

/// First-order data of M_δ in the small-twist form x1 = x + γ + δ l1, y1 = y + δ l2:
/// l1 = h(y) + u0(x) - u0(x+γ), l2 = b(x+γ/2) + v0(x) - v0(x+γ).
std::pair<QPSeries, QPSeries> small_twist_terms(const ReversibleMapSpec& spec, const Truncation& trunc);

class ReversibleMap {
 public:
  explicit ReversibleMap(ReversibleMapSpec spec);

  const ReversibleMapSpec& spec() const { return spec_; }
  /// Throws orbit-escape when the input or the image leaves |y| <= radius.
  Point2 operator()(Point2 z) const;
  /// Newton inversion of the map.
  Point2 inverse(Point2 z) const;
  static Point2 involution(Point2 z) { return {-z.x, z.y}; }
  /// sup over an n×n grid of x in [0, 2π), |y| <= radius/2 of |M(G(M(z))) - G(z)|.
  double reversibility_residual(int n = 32) const;

  /// h(y), the twist function of the core map.
  double h(double y) const;

 private:
  Point2 core(Point2 z) const;
  Point2 conj(Point2 z) const;
  Point2 conj_inverse(Point2 z) const;

  ReversibleMapSpec spec_;
  SparseSeries b_, u0_, v0_, u0x_;
  bool conjugated_ = false;
};

struct RotationEstimate {
  double value = 0.0;
  double error = 0.0;
};

struct OrbitRecord {
  std::vector<Point2> samples;  // (angle, action) per section point
  RotationEstimate rotation;    // set when >= 1000 points
  bool has_rotation = false;
  double action_min = 0.0;
  double action_max = 0.0;
  int iterations = 0;
  bool escaped = false;
  double reversibility_residual = 0.0;
};

/// n forward images; the last state is checked against G∘M∘G = M^{-1}. With
/// allow_escape the orbit is truncated and flagged instead of throwing orbit-escape.
OrbitRecord iterate_map(const ReversibleMap& map, Point2 z0, int n, bool allow_escape = false);

/// Weighted Birkhoff average of the angle increments with the bump weight
/// exp(-1/(s(1-s))); the error bar is the discrepancy between the full window
/// and its last quarter. Throws insufficient-data below 1000 points.
RotationEstimate rotation_number(const OrbitRecord& orbit);

struct CurveDetection {
  RotationEstimate rotation;
  double oscillation = 0.0;  // max - min of the action
  bool detected = false;
};

/// Error bar < 1e-8 and action oscillation < 10 * perturbation over the orbit.
CurveDetection detect_invariant_curve(const OrbitRecord& orbit, double perturbation);

// ---------------------------------------------------------------- flows

/// Time map of x' = γ + y + f(x,y,t), y' = g(x,y,t) by an adaptive embedded
/// Runge–Kutta–Fehlberg 7(8) scheme.
class FlowSectionMap {
 public:
  /// Throws parity-violation unless f is even and g odd under (x,t) -> (-x,-t).
  FlowSectionMap(const QPSeries& f, const QPSeries& g, double gamma, double tolerance = 1e-12);

  Point2 advance(Point2 z, double t0, double t1) const;
  /// Section map over one forcing period [0, 2π].
  Point2 operator()(Point2 z) const;
  double radius() const { return radius_; }
  double gamma() const { return gamma_; }

 private:
  SparseSeries f_, g_;
  double gamma_, tol_, radius_;
};

OrbitRecord iterate_section(const FlowSectionMap& map, Point2 z0, int n, bool allow_escape = false);

// ---------------------------------------------------------------- oscillator

/// Scalar nonlinearities with finite limits at ±∞.
struct ScalarFunction {
  enum class Kind { zero, constant, arctan, arctan_square, tanh };
  Kind kind = Kind::zero;
  double amp = 1.0;
  double scale = 1.0;

  double operator()(double x) const;
  double limit(int sign) const;
  bool is_even() const { return kind != Kind::arctan && kind != Kind::tanh; }

  static ScalarFunction from_name(const std::string& name, double amp = 1.0, double scale = 1.0);
  std::string name() const;
};

/// x'' + φ(x) f(x') + ω² x + g(x) = p(t), p quasi-periodic with frequencies μ.
struct OscillatorSpec {
  double omega0 = 1.0;
  ScalarFunction phi;
  ScalarFunction f_damp;
  ScalarFunction g_nl;
  /// p(t) stored as an x-only series with freq.omega = μ (the "x" slot is t).
  QPSeries p_force;
  double r_ceiling = 1e6;
  double tolerance = 1e-12;

  /// Throws parity-violation unless f_damp and p are even; invalid-argument for ω <= 0.
  void validate() const;
  double forcing(double t) const;
  /// 2π/μ_1, or 2π when no forcing series is stored.
  double section_period() const;
};

/// Samples are (θ, r) at t = j·T, T = 2π/μ_1, with θ unwrapped. The time-reversal
/// residual compares G z(0) with the integration from G z(T_c) over [-T_c, 0]
/// where T_c covers the first min(n, reversal_periods) returns.
OrbitRecord oscillator_poincare(const OscillatorSpec& spec, Point2 z0, int n_periods, int reversal_periods = 20);

/// J_1(λ) = (1/2πλ) ∫ φ(λ cos ϕ) f(ωλ sin ϕ) cos ϕ dϕ and J_2(λ) = (1/2πλ) ∫ g(λ cos ϕ) cos ϕ dϕ.
double j1(const OscillatorSpec& spec, double lambda);
double j2(const OscillatorSpec& spec, double lambda);
/// S_1(θ, r) = -ω^{-2} ∫_0^θ (φ(r cos ϕ) f(ωr sin ϕ) + g(r cos ϕ)) sin ϕ dϕ.
double s1(const OscillatorSpec& spec, double theta, double r);
/// S_2(θ, λ) = ω^{-3} λ^{-1} ∫_0^θ (φ f cos ϕ - λJ_1) + (g cos ϕ - λJ_2) dϕ.
double s2(const OscillatorSpec& spec, double theta, double lambda);

/// S_3(θ, τ) = e^{iθ} Σ χ⁺_k e^{i⟨k,μ⟩τ} + e^{-iθ} Σ χ⁻_k e^{i⟨k,μ⟩τ}.
struct S3Solution {
  double omega0 = 1.0;
  std::vector<double> kdot;  // ⟨k, μ⟩ per stored k
  std::vector<cplx> p;
  std::vector<cplx> chi_plus;
  std::vector<cplx> chi_minus;
  double min_divisor = 0.0;

  double operator()(double theta, double tau) const;
  double d_theta(double theta, double tau) const;
  double d_tau(double theta, double tau) const;
};

/// Throws divisor-failure when |⟨k,μ⟩/ω ± 1| falls below the certificate bound
/// c0/|k|^σ (certificate built for frequencies μ and γ = 1/ω).
S3Solution solve_s3(const OscillatorSpec& spec, const DiophCertificate& cert);
/// max over an n×n grid of (θ, τ) of |ω^{-3} p(τ) cos θ + ∂_θ S_3 + ω^{-1} ∂_τ S_3|.
double s3_residual(const OscillatorSpec& spec, const S3Solution& s3, int n = 64);

struct ChainReport {
  std::vector<double> lambdas;
  std::vector<double> j1, j2;
  std::vector<double> s1_sup, s2_sup;
  std::vector<double> phi_remainder;  // sup |Φ - leading| = O(r^{-1})
  std::vector<double> psi_remainder;  // sup |Ψ - leading| = O(r^{-2})
  double j1_limit = 0.0;  // (1/π)(φ(+∞) - φ(-∞)) f(+∞)
  double j2_limit = 0.0;  // (1/π)(g(+∞) - g(-∞))
  double slope_j1 = 0.0, slope_j2 = 0.0, slope_s1 = 0.0, slope_s2 = 0.0;
  double slope_phi = 0.0, slope_psi = 0.0;
  double amplitude_floor = 0.0;  // 2C/ω with C sampled on a probe grid
  double s3_residual = 0.0;
  double s3_min_divisor = 0.0;
};

/// Runs the transform chain at the given amplitudes (at least 3, all above the
/// amplitude floor, else invalid-argument) and measures the decay classes.
ChainReport action_angle_chain(const OscillatorSpec& spec, const DiophCertificate& cert,
                               const std::vector<double>& lambdas);

struct TwistResult {
  double gamma1 = 0.0;
  bool zero_twist = false;
};

/// γ_1 = -2ω^{-3}((φ(+∞) - φ(-∞)) f(+∞) + (g(+∞) - g(-∞))); zero_twist flags γ_1 = 0.
TwistResult twist_coefficient(const OscillatorSpec& spec);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kamlab
