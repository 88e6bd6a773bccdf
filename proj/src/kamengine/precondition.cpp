#include <algorithm>
#include <cmath>
#include <string>

#include "kamlab/error.hpp"
#include "kamlab/kamengine.hpp"

namespace kamlab {

Precondition small_twist_precondition(const QPSeries& l1, const QPSeries& l2, double gamma, int N) {
  require_same_frequency(l1, l2);
  if (!(l1.trunc() == l2.trunc()) || l1.radius() != l2.radius()) {
    throw Error(ErrorKind::invalid_argument, "l1 and l2 must share truncation and radius");
  }
  if (N < 1) throw Error(ErrorKind::invalid_argument, "N must be >= 1");
  const ModeLayout& lay = l1.layout();
  const std::size_t nc = lay.n_cheb();
  const double r = l1.radius();
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    if (lay.l_of(q) == 0) continue;
    for (std::size_t c = 0; c < nc; ++c) {
      if (l1.mode(q)[c] != cplx{0.0} || l2.mode(q)[c] != cplx{0.0}) {
        throw Error(ErrorKind::invalid_argument, "l1 and l2 must not depend on t");
      }
    }
  }
  const std::vector<int> k0(static_cast<std::size_t>(lay.m()), 0);
  const double scale2 = std::max(l2.max_abs(), 1e-300);
  for (const cplx& a : l2.mode(k0, 0)) {
    if (std::abs(a) > 1e-12 * scale2) throw Error(ErrorKind::parity_violation, "l2 has a nonzero mean");
  }

  Precondition out;
  out.h = l1.coefficient(k0, 0);
  out.u = QPSeries::zeros_like(l1, Parity::none);
  out.v = QPSeries::zeros_like(l1, Parity::none);
  QPSeries R1 = QPSeries::zeros_like(l1, Parity::none);
  QPSeries R2 = QPSeries::zeros_like(l1, Parity::none);
  const auto kd = lay.k_dot(l1.freq());
  const double scale = std::max({l1.max_abs(), l2.max_abs(), 1e-300});
  double sym = 0.0;
  out.min_divisor = HUGE_VAL;
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    if (lay.l_of(q) != 0) continue;
    const std::size_t kidx = lay.kidx_of_mode(q);
    const auto k = lay.k_of(kidx);
    int kabs = 0;
    for (int v : k) kabs = std::max(kabs, std::abs(v));
    if (kabs == 0) continue;
    const cplx e = std::polar(1.0, kd[kidx] * gamma);
    const std::size_t qn = lay.neg(q);
    for (std::size_t c = 0; c < nc; ++c) {
      sym = std::max({sym, std::abs(l1.mode(q)[c] - l1.mode(qn)[c] * e), std::abs(l2.mode(q)[c] + l2.mode(qn)[c] * e)});
    }
    if (kabs >= N) {
      for (std::size_t c = 0; c < nc; ++c) {
        R1.mode(q)[c] = l1.mode(q)[c];
        R2.mode(q)[c] = l2.mode(q)[c];
      }
      continue;
    }
    const cplx d = e - 1.0;
    out.min_divisor = std::min(out.min_divisor, std::abs(d));
    if (std::abs(d) < 1e-12) {
      std::string ks;
      for (int v : k) ks += (ks.empty() ? "" : ",") + std::to_string(v);
      throw Error(ErrorKind::resonant_divisor, "|exp(i<k,w>gamma) - 1| below 1e-12 at k=(" + ks + ")");
    }
    for (std::size_t c = 0; c < nc; ++c) {
      const cplx u = -l1.mode(q)[c] / d;
      const cplx v = -l2.mode(q)[c] / d;
      out.u.mode(q)[c] = u;
      out.v.mode(q)[c] = v;
      R1.mode(q)[c] = u * d + l1.mode(q)[c];
      R2.mode(q)[c] = v * d + l2.mode(q)[c];
    }
  }
  out.symmetry_residual = sym / scale;
  if (out.symmetry_residual <= 1e-12) {
    out.u.set_parity(Parity::odd);
    out.v.set_parity(Parity::even);
  }
  out.r1 = norm(R1, 0.0, r);
  out.r2 = norm(R2, 0.0, r);
  out.tail1 = tail_majorant(l1, N, 0.0, r);
  out.tail2 = tail_majorant(l2, N, 0.0, r);

  const YPoly dh = out.h.derivative();
  out.min_twist = HUGE_VAL;
  for (int i = 0; i <= 64; ++i) {
    const double y = r * (2.0 * i / 64.0 - 1.0);
    out.min_twist = std::min(out.min_twist, dh(y).real());
  }
  return out;
}

}  // namespace kamlab
