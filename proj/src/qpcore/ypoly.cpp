#include "kamlab/ypoly.hpp"

#include <cmath>
#include <numbers>

#include "kamlab/error.hpp"

namespace kamlab {
namespace cheb {

cplx eval(std::span<const cplx> c, cplx s) {
  if (c.empty()) return 0.0;
  cplx b1 = 0.0, b2 = 0.0;
  const cplx two_s = 2.0 * s;
  for (std::size_t n = c.size() - 1; n >= 1; --n) {
    const cplx b0 = c[n] + two_s * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + s * b1 - b2;
}

double eval(std::span<const double> c, double s) {
  if (c.empty()) return 0.0;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t n = c.size() - 1; n >= 1; --n) {
    const double b0 = c[n] + 2.0 * s * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + s * b1 - b2;
}

void derivative(std::span<const cplx> c, std::span<cplx> out) {
  const std::size_t n = c.size();
  if (n == 0) return;
  std::vector<cplx> d(n + 1, 0.0);
  for (std::size_t k = n - 1; k >= 1; --k) {
    d[k - 1] = d[k + 1] + 2.0 * static_cast<double>(k) * c[k];
  }
  d[0] *= 0.5;
  for (std::size_t k = 0; k < n; ++k) out[k] = d[k];
  out[n - 1] = 0.0;
}

std::vector<cplx> to_monomial(std::span<const cplx> c) {
  const std::size_t n = c.size();
  std::vector<cplx> b(n, 0.0);
  // Rows of T_k in the monomial basis, built by T_{k+1} = 2 s T_k - T_{k-1}.
  std::vector<double> tkm1(n, 0.0), tk(n, 0.0), tkp1(n, 0.0);
  tkm1[0] = 1.0;
  if (n > 0) b[0] += c[0];
  if (n > 1) {
    tk[1] = 1.0;
    b[1] += c[1];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    std::fill(tkp1.begin(), tkp1.end(), 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) tkp1[j + 1] += 2.0 * tk[j];
    for (std::size_t j = 0; j < n; ++j) tkp1[j] -= tkm1[j];
    for (std::size_t j = 0; j < n; ++j) b[j] += c[k + 1] * tkp1[j];
    tkm1.swap(tk);
    tk.swap(tkp1);
  }
  return b;
}

std::vector<double> nodes(int n) {
  std::vector<double> s(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) s[j] = std::cos(std::numbers::pi * (j + 0.5) / n);
  return s;
}

void analyse(std::span<const cplx> values, std::span<cplx> coeffs) {
  const int n = static_cast<int>(values.size());
  const int nc = static_cast<int>(coeffs.size());
  for (int k = 0; k < nc; ++k) {
    cplx acc = 0.0;
    if (k < n) {
      for (int j = 0; j < n; ++j) {
        acc += values[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
      }
      acc *= (k == 0 ? 1.0 : 2.0) / n;
    }
    coeffs[k] = acc;
  }
}

std::vector<cplx> from_monomial(std::span<const cplx> b) {
  const int n = static_cast<int>(b.size());
  if (n == 0) return {};
  const auto s = nodes(n);
  std::vector<cplx> vals(n);
  for (int j = 0; j < n; ++j) {
    cplx acc = 0.0;
    for (int k = n - 1; k >= 0; --k) acc = acc * s[j] + b[k];
    vals[j] = acc;
  }
  std::vector<cplx> c(n);
  analyse(vals, c);
  return c;
}

double sup_bound(std::span<const cplx> c, double r, double rho) {
  bool any = false;
  for (const auto& v : c) any = any || v != cplx{0.0};
  if (!any) return 0.0;
  const auto b = to_monomial(c);
  const double q = rho / r;
  double acc = 0.0, pw = 1.0;
  for (const auto& v : b) {
    acc += std::abs(v) * pw;
    pw *= q;
  }
  return acc;
}

}  // namespace cheb

YPoly::YPoly(std::vector<cplx> coeffs, double radius) : c_(std::move(coeffs)), r_(radius) {
  if (c_.empty()) c_.assign(1, 0.0);
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_argument, "YPoly radius must be positive");
}

YPoly YPoly::zero(int degree, double radius) {
  return YPoly(std::vector<cplx>(static_cast<std::size_t>(degree + 1), 0.0), radius);
}

YPoly YPoly::constant(cplx value, int degree, double radius) {
  YPoly p = zero(degree, radius);
  p.c_[0] = value;
  return p;
}

YPoly YPoly::identity(int degree, double radius) {
  YPoly p = zero(degree, radius);
  if (degree >= 1) p.c_[1] = radius;
  return p;
}

YPoly YPoly::from_monomial(std::span<const cplx> a, int degree, double radius) {
  std::vector<cplx> b(static_cast<std::size_t>(degree + 1), 0.0);
  double pw = 1.0;
  for (int j = 0; j <= degree && j < static_cast<int>(a.size()); ++j) {
    b[j] = a[j] * pw;
    pw *= radius;
  }
  return YPoly(cheb::from_monomial(b), radius);
}

cplx YPoly::operator()(double y) const {
  if (std::abs(y) > r_ * (1.0 + 1e-14)) {
    throw Error(ErrorKind::action_out_of_range,
                "|y| = " + std::to_string(std::abs(y)) + " exceeds radius " + std::to_string(r_));
  }
  return eval_unchecked(y);
}

cplx YPoly::eval_unchecked(cplx y) const { return cheb::eval(c_, y / r_); }

YPoly YPoly::derivative() const {
  std::vector<cplx> d(c_.size());
  cheb::derivative(c_, d);
  for (auto& v : d) v /= r_;
  return YPoly(std::move(d), r_);
}

std::vector<cplx> YPoly::monomial() const {
  auto b = cheb::to_monomial(c_);
  double scale = 1.0;
  for (auto& v : b) {
    v /= scale;
    scale *= r_;
  }
  return b;
}

double YPoly::sup_bound(double rho) const { return cheb::sup_bound(c_, r_, rho); }

YPoly YPoly::restricted(double r_new) const {
  const int n = degree() + 1;
  const auto s = cheb::nodes(n);
  std::vector<cplx> vals(n);
  for (int j = 0; j < n; ++j) vals[j] = eval_unchecked(r_new * s[j]);
  std::vector<cplx> c(n);
  cheb::analyse(vals, c);
  return YPoly(std::move(c), r_new);
}

}  // namespace kamlab
