#pragma once

#include <complex>
#include <span>
#include <vector>

namespace kamlab {

using cplx = std::complex<double>;

namespace cheb {

/// Σ c_n T_n(s) by Clenshaw; s may lie outside [-1, 1] (plain extrapolation).
cplx eval(std::span<const cplx> c, cplx s);
double eval(std::span<const double> c, double s);

/// Coefficients of d/ds written in place into `out` (same length; top entry zero).
void derivative(std::span<const cplx> c, std::span<cplx> out);

/// Monomial coefficients b_j with Σ c_n T_n(s) = Σ b_j s^j.
std::vector<cplx> to_monomial(std::span<const cplx> c);
std::vector<cplx> from_monomial(std::span<const cplx> b);

/// Gauss–Chebyshev nodes cos(π(j+1/2)/n), j = 0..n-1.
std::vector<double> nodes(int n);

/// Values at nodes(n) -> first `ncoef` Chebyshev coefficients (exact for degree < n).
void analyse(std::span<const cplx> values, std::span<cplx> coeffs);

}  // namespace cheb

/// Polynomial in the action variable y on [-r, r], stored as Chebyshev
/// coefficients of s = y / r. Degree is fixed at construction.
class YPoly {
 public:
  YPoly() = default;
  YPoly(std::vector<cplx> coeffs, double radius);

  static YPoly zero(int degree, double radius);
  static YPoly constant(cplx value, int degree, double radius);
  /// p(y) = y.
  static YPoly identity(int degree, double radius);
  /// From monomial coefficients a_j of y^j (truncated to `degree`).
  static YPoly from_monomial(std::span<const cplx> a, int degree, double radius);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double radius() const { return r_; }
  std::span<const cplx> coeffs() const { return c_; }
  std::span<cplx> coeffs() { return c_; }

  /// Throws action-out-of-range for |y| > r.
  cplx operator()(double y) const;
  cplx eval_unchecked(cplx y) const;

  YPoly derivative() const;
  /// Monomial coefficients a_j of y^j.
  std::vector<cplx> monomial() const;
  /// Σ |a_j| rho^j: bounds |p| on the complex disk |y| <= rho.
  double sup_bound(double rho) const;
  /// Same polynomial re-expanded on [-r_new, r_new] (exact).
  YPoly restricted(double r_new) const;

 private:
  std::vector<cplx> c_{cplx{0.0}};
  double r_ = 1.0;
};

namespace cheb {
/// Majorant Σ|a_j| (rho/r)^j of a Chebyshev slice stored on radius r.
double sup_bound(std::span<const cplx> c, double r, double rho);
}  // namespace cheb

}  // namespace kamlab
