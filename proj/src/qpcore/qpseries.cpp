#include <algorithm>
#include <cmath>

#include "kamlab/error.hpp"
#include "kamlab/qpcore.hpp"

namespace kamlab {

double FrequencyData::dot(std::span<const int> k) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < omega.size(); ++j) acc += k[j] * omega[j];
  return acc;
}

void FrequencyData::validate() const {
  if (omega.empty()) throw Error(ErrorKind::invalid_argument, "omega must have at least one entry");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!std::isfinite(omega[i]) || omega[i] == 0.0) {
      throw Error(ErrorKind::invalid_argument, "omega entries must be finite and nonzero");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (omega[i] == omega[j]) throw Error(ErrorKind::invalid_argument, "omega entries must be distinct");
    }
  }
  if (!std::isfinite(gamma)) throw Error(ErrorKind::invalid_argument, "gamma must be finite");
}

const char* to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::none: return "none";
  }
  return "none";
}

Parity parity_from_string(const std::string& s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  if (s == "none") return Parity::none;
  throw Error(ErrorKind::invalid_argument, "unknown parity '" + s + "'");
}

Parity parity_product(Parity a, Parity b) {
  if (a == Parity::none || b == Parity::none) return Parity::none;
  return a == b ? Parity::even : Parity::odd;
}

Parity parity_flip(Parity p) {
  if (p == Parity::even) return Parity::odd;
  if (p == Parity::odd) return Parity::even;
  return Parity::none;
}

ModeLayout::ModeLayout(int m, const Truncation& trunc) : m_(m), trunc_(trunc) {
  if (m < 1 || trunc.k_max < 0 || trunc.l_max < 0 || trunc.d_y < 0) {
    throw Error(ErrorKind::invalid_argument, "invalid truncation");
  }
  n_k_ = 1;
  for (int j = 0; j < m; ++j) n_k_ *= static_cast<std::size_t>(2 * trunc.k_max + 1);
}

std::vector<int> ModeLayout::k_of(std::size_t kidx) const {
  const auto base = static_cast<std::size_t>(2 * trunc_.k_max + 1);
  std::vector<int> k(static_cast<std::size_t>(m_));
  for (int j = m_ - 1; j >= 0; --j) {
    k[j] = static_cast<int>(kidx % base) - trunc_.k_max;
    kidx /= base;
  }
  return k;
}

std::size_t ModeLayout::mode_of(std::span<const int> k, int l) const {
  if (std::abs(l) > trunc_.l_max) return n_modes();
  const auto base = static_cast<std::size_t>(2 * trunc_.k_max + 1);
  std::size_t kidx = 0;
  for (int j = 0; j < m_; ++j) {
    if (std::abs(k[j]) > trunc_.k_max) return n_modes();
    kidx = kidx * base + static_cast<std::size_t>(k[j] + trunc_.k_max);
  }
  return kidx * n_l() + static_cast<std::size_t>(l + trunc_.l_max);
}

std::vector<double> ModeLayout::k_dot(const FrequencyData& f) const {
  std::vector<double> out(n_k_);
  for (std::size_t i = 0; i < n_k_; ++i) out[i] = f.dot(k_of(i));
  return out;
}

std::vector<int> ModeLayout::k_l1() const {
  std::vector<int> out(n_k_);
  for (std::size_t i = 0; i < n_k_; ++i) {
    int acc = 0;
    for (int v : k_of(i)) acc += std::abs(v);
    out[i] = acc;
  }
  return out;
}

QPSeries::QPSeries(FrequencyData freq, Truncation trunc, double radius, Parity parity)
    : freq_(std::move(freq)), layout_(static_cast<int>(freq_.omega.size()), trunc), radius_(radius),
      parity_(parity), c_(layout_.size(), cplx{0.0}) {
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_argument, "series radius must be positive");
}

QPSeries QPSeries::zero(const FrequencyData& freq, const Truncation& trunc, double radius, Parity parity) {
  return QPSeries(freq, trunc, radius, parity);
}

QPSeries QPSeries::zeros_like(const QPSeries& like, Parity parity) {
  return QPSeries(like.freq_, like.trunc(), like.radius_, parity);
}

QPSeries QPSeries::constant(const FrequencyData& freq, const Truncation& trunc, double radius, double value) {
  QPSeries f(freq, trunc, radius, Parity::even);
  const std::vector<int> k0(static_cast<std::size_t>(freq.m()), 0);
  f.mode(k0, 0)[0] = value;
  return f;
}

QPSeries QPSeries::action(const FrequencyData& freq, const Truncation& trunc, double radius) {
  QPSeries f(freq, trunc, radius, Parity::even);
  if (trunc.d_y >= 1) {
    const std::vector<int> k0(static_cast<std::size_t>(freq.m()), 0);
    f.mode(k0, 0)[1] = radius;
  }
  return f;
}

std::span<cplx> QPSeries::mode(std::span<const int> k, int l) {
  const auto q = layout_.mode_of(k, l);
  if (q >= layout_.n_modes()) throw Error(ErrorKind::invalid_argument, "mode outside truncation box");
  return mode(q);
}

std::span<const cplx> QPSeries::mode(std::span<const int> k, int l) const {
  const auto q = layout_.mode_of(k, l);
  if (q >= layout_.n_modes()) throw Error(ErrorKind::invalid_argument, "mode outside truncation box");
  return mode(q);
}

YPoly QPSeries::coefficient(std::span<const int> k, int l) const {
  const auto s = mode(k, l);
  return YPoly(std::vector<cplx>(s.begin(), s.end()), radius_);
}

void QPSeries::set_coefficient(std::span<const int> k, int l, const YPoly& p) {
  auto s = mode(k, l);
  const YPoly q = p.radius() == radius_ ? p : p.restricted(radius_);
  std::fill(s.begin(), s.end(), cplx{0.0});
  for (std::size_t c = 0; c < s.size() && c < q.coeffs().size(); ++c) s[c] = q.coeffs()[c];
}

namespace {

std::vector<cplx> monomial_cheb(std::span<const double> py, int degree, double radius) {
  std::vector<cplx> a;
  if (py.empty()) {
    a.assign(1, 1.0);
  } else {
    a.assign(py.begin(), py.end());
  }
  const YPoly p = YPoly::from_monomial(a, degree, radius);
  return {p.coeffs().begin(), p.coeffs().end()};
}

}  // namespace

void QPSeries::add_cos(std::span<const int> k, int l, double a, std::span<const double> py) {
  const auto cy = monomial_cheb(py, trunc().d_y, radius_);
  const auto q = layout_.mode_of(k, l);
  if (q >= layout_.n_modes()) throw Error(ErrorKind::invalid_argument, "mode outside truncation box");
  const auto qn = layout_.neg(q);
  for (std::size_t c = 0; c < cy.size(); ++c) {
    if (q == qn) {
      mode(q)[c] += a * cy[c];
    } else {
      mode(q)[c] += 0.5 * a * cy[c];
      mode(qn)[c] += 0.5 * a * cy[c];
    }
  }
}

void QPSeries::add_sin(std::span<const int> k, int l, double a, std::span<const double> py) {
  const auto cy = monomial_cheb(py, trunc().d_y, radius_);
  const auto q = layout_.mode_of(k, l);
  if (q >= layout_.n_modes()) throw Error(ErrorKind::invalid_argument, "mode outside truncation box");
  const auto qn = layout_.neg(q);
  if (q == qn) return;  // sin(0) = 0
  const cplx half_i{0.0, 0.5};
  for (std::size_t c = 0; c < cy.size(); ++c) {
    // sin z = (e^{iz} - e^{-iz}) / (2i)
    mode(q)[c] += -half_i * a * cy[c];
    mode(qn)[c] += half_i * a * cy[c];
  }
}

bool QPSeries::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const cplx& v) { return v == cplx{0.0}; });
}

double QPSeries::max_abs() const {
  double mx = 0.0;
  for (const auto& v : c_) mx = std::max(mx, std::abs(v));
  return mx;
}

}  // namespace kamlab
