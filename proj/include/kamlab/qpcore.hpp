#pragma once

// Quasi-periodic Fourier series in (x, y, t).
//
// A series is stored through its shell function: a trigonometric polynomial
// in (θ_1..θ_m, t) with θ = ωx, whose coefficients are Chebyshev polynomials
// in the action y on [-r, r]. Storage is a dense box |k|_∞ <= K_max,
// |l| <= L_max, Chebyshev degree <= D_y.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kamlab/ypoly.hpp"

namespace kamlab {

struct FrequencyData {
  std::vector<double> omega;
  double gamma = 0.0;

  int m() const { return static_cast<int>(omega.size()); }
  double dot(std::span<const int> k) const;
  /// Throws invalid-argument unless entries are nonzero and pairwise distinct.
  void validate() const;

  bool operator==(const FrequencyData&) const = default;
};

struct FourierIndex {
  std::vector<int> k;
  int l = 0;

  bool operator==(const FourierIndex&) const = default;
};

struct Truncation {
  int k_max = 16;
  int l_max = 16;
  int d_y = 8;

  bool operator==(const Truncation&) const = default;
};

enum class Parity { even, odd, none };

const char* to_string(Parity p);
Parity parity_from_string(const std::string& s);
Parity parity_product(Parity a, Parity b);
Parity parity_flip(Parity p);

/// Flat indexing of the (k, l, c) box. Mode q = kidx * (2L+1) + (l+L); the
/// mode of (-k, -l) is n_modes() - 1 - q.
class ModeLayout {
 public:
  ModeLayout() = default;
  ModeLayout(int m, const Truncation& trunc);

  int m() const { return m_; }
  const Truncation& trunc() const { return trunc_; }
  std::size_t n_k() const { return n_k_; }
  std::size_t n_l() const { return static_cast<std::size_t>(2 * trunc_.l_max + 1); }
  std::size_t n_modes() const { return n_k_ * n_l(); }
  std::size_t n_cheb() const { return static_cast<std::size_t>(trunc_.d_y + 1); }
  std::size_t size() const { return n_modes() * n_cheb(); }

  std::vector<int> k_of(std::size_t kidx) const;
  int l_of(std::size_t q) const { return static_cast<int>(q % n_l()) - trunc_.l_max; }
  std::size_t kidx_of_mode(std::size_t q) const { return q / n_l(); }
  /// Returns n_modes() when (k, l) lies outside the box.
  std::size_t mode_of(std::span<const int> k, int l) const;
  std::size_t neg(std::size_t q) const { return n_modes() - 1 - q; }

  /// ⟨k, ω⟩ for every kidx.
  std::vector<double> k_dot(const FrequencyData& f) const;
  /// |k|_1 for every kidx.
  std::vector<int> k_l1() const;

 private:
  int m_ = 0;
  Truncation trunc_{};
  std::size_t n_k_ = 0;
};

class QPSeries {
 public:
  QPSeries() = default;
  QPSeries(FrequencyData freq, Truncation trunc, double radius, Parity parity = Parity::none);

  static QPSeries zero(const FrequencyData& freq, const Truncation& trunc, double radius,
                       Parity parity = Parity::none);
  /// Series with the same frequency, truncation and radius as `like`.
  static QPSeries zeros_like(const QPSeries& like, Parity parity);
  /// Constant function.
  static QPSeries constant(const FrequencyData& freq, const Truncation& trunc, double radius,
                           double value);
  /// The function (x, y, t) -> y.
  static QPSeries action(const FrequencyData& freq, const Truncation& trunc, double radius);

  const FrequencyData& freq() const { return freq_; }
  const Truncation& trunc() const { return layout_.trunc(); }
  const ModeLayout& layout() const { return layout_; }
  double radius() const { return radius_; }
  Parity parity() const { return parity_; }
  void set_parity(Parity p) { parity_ = p; }

  std::span<const cplx> data() const { return c_; }
  std::span<cplx> data() { return c_; }

  /// Chebyshev slice of mode q.
  std::span<cplx> mode(std::size_t q) { return {c_.data() + q * layout_.n_cheb(), layout_.n_cheb()}; }
  std::span<const cplx> mode(std::size_t q) const {
    return {c_.data() + q * layout_.n_cheb(), layout_.n_cheb()};
  }
  /// Slice for (k, l); throws invalid-argument outside the box.
  std::span<cplx> mode(std::span<const int> k, int l);
  std::span<const cplx> mode(std::span<const int> k, int l) const;
  YPoly coefficient(std::span<const int> k, int l) const;
  void set_coefficient(std::span<const int> k, int l, const YPoly& p);

  /// Adds a * cos(⟨k,ω⟩x + l t) (even) or a * sin(...) (odd) as a conjugate pair,
  /// with y-dependence `py` (monomial coefficients, default constant 1).
  void add_cos(std::span<const int> k, int l, double a, std::span<const double> py = {});
  void add_sin(std::span<const int> k, int l, double a, std::span<const double> py = {});

  bool is_zero() const;
  double max_abs() const;

 private:
  FrequencyData freq_{};
  ModeLayout layout_{};
  double radius_ = 1.0;
  Parity parity_ = Parity::none;
  std::vector<cplx> c_;
};

struct StripNorm {
  double s = 0.0;
  double r = 0.0;
  double value = 0.0;
};

enum class Var { x, y, t };
enum class AlgebraOp { add, sub, mul };

/// Σ coeff_{k,l}(y) exp(i(⟨k,ω⟩x + l t)); throws action-out-of-range for |y| > r.
cplx eval(const QPSeries& f, double x, double y, double t);
/// Evaluation on the shell torus (θ ∈ R^m instead of x), no range check on y.
cplx eval_shell(const QPSeries& f, std::span<const cplx> theta, cplx y, cplx t);

QPSeries algebra(const QPSeries& f, const QPSeries& g, AlgebraOp op);
/// Product with the discarded-tail majorant reported through `tail`.
QPSeries multiply(const QPSeries& f, const QPSeries& g, double* tail = nullptr);
QPSeries scaled(const QPSeries& f, cplx a);
/// f * y (exact in the Chebyshev basis up to the degree cap).
QPSeries times_action(const QPSeries& f);

QPSeries derivative(const QPSeries& f, Var wrt);

/// Weighted-ℓ¹ majorant Σ sup_{|y|<=r}|coeff| exp(s(|⟨k,ω⟩| + |l|)) over the
/// complex strip. Requires s >= 0 and 0 < r <= f.radius().
StripNorm strip_norm(const QPSeries& f, double s, double r);
inline double norm(const QPSeries& f, double s, double r) { return strip_norm(f, s, r).value; }
/// Majorant on the shell strip |Im θ_j|, |Im t| <= s: weights exp(s(|k|_1 + |l|)).
double shell_norm(const QPSeries& f, double s, double r);

/// max |c(k,l) - conj c(-k,-l)| relative to max |c| (0 for the zero series).
double reality_residual(const QPSeries& f);
/// max |c(k,l) ∓ c(-k,-l)| relative to max |c|, for the given parity.
double parity_residual(const QPSeries& f, Parity p);
/// Orthogonal projection onto real series of the given parity; the tag is set.
QPSeries symmetrized(const QPSeries& f, Parity p);

/// Same function re-expanded on the smaller (or larger) action radius.
QPSeries with_radius(const QPSeries& f, double r_new);
/// Same function with another truncation box (extra modes zero, outer modes dropped).
QPSeries with_truncation(const QPSeries& f, const Truncation& trunc);
/// The (x, t) series of f(·, y0, ·), stored with y-degree 0.
QPSeries at_action(const QPSeries& f, double y0);

/// Majorant of the modes with max(|k|_∞) >= n_from (used for tails).
double tail_majorant(const QPSeries& f, int n_from, double s, double r);

struct ComposeOptions {
  /// Re-expansion residual (outer-band majorant) tolerated relative to ‖g‖.
  double tolerance = 1e-8;
  int oversample = 2;
};

/// (x,y,t) -> g(x + shift(x,y,t), y, t), by collocation and re-expansion.
/// The constant part of the shift is applied exactly; its oscillatory part
/// must be smaller than half the Nyquist margin π / (K_max max|ω_j|).
QPSeries compose_shift(const QPSeries& g, const QPSeries& shift, const ComposeOptions& opt = {});

/// (ξ,η,t) -> g(ξ + sx(ξ,η,t), η + sy(ξ,η,t), t). The result lives on the
/// truncation and radius of `sx`.
QPSeries compose(const QPSeries& g, const QPSeries& sx, const QPSeries& sy,
                 const ComposeOptions& opt = {}, double* residual = nullptr);

void require_same_frequency(const QPSeries& f, const QPSeries& g);

}  // namespace kamlab
