#include <algorithm>
#include <cmath>
#include <numbers>

#include "kamlab/collocation.hpp"
#include "kamlab/error.hpp"
#include "kamlab/qpcore.hpp"

namespace kamlab {

void require_same_frequency(const QPSeries& f, const QPSeries& g) {
  if (!(f.freq() == g.freq())) throw Error(ErrorKind::frequency_mismatch, "series carry different frequency data");
}

cplx eval_shell(const QPSeries& f, std::span<const cplx> theta, cplx y, cplx t) {
  const ModeLayout& lay = f.layout();
  const int m = lay.m();
  const int K = lay.trunc().k_max;
  const int L = lay.trunc().l_max;
  const int nk1 = 2 * K + 1;
  std::vector<cplx> pw(static_cast<std::size_t>(m * nk1));
  for (int j = 0; j < m; ++j) {
    const cplx e = std::exp(cplx{0.0, 1.0} * theta[j]);
    cplx* row = &pw[static_cast<std::size_t>(j * nk1)];
    row[K] = 1.0;
    for (int k = 1; k <= K; ++k) {
      row[K + k] = row[K + k - 1] * e;
      row[K - k] = row[K - k + 1] / e;
    }
  }
  std::vector<cplx> pt(static_cast<std::size_t>(2 * L + 1));
  {
    const cplx e = std::exp(cplx{0.0, 1.0} * t);
    pt[L] = 1.0;
    for (int l = 1; l <= L; ++l) {
      pt[L + l] = pt[L + l - 1] * e;
      pt[L - l] = pt[L - l + 1] / e;
    }
  }
  const cplx s = y / f.radius();
  cplx acc = 0.0;
  std::vector<int> digit(static_cast<std::size_t>(m), 0);
  for (std::size_t kidx = 0; kidx < lay.n_k(); ++kidx) {
    cplx inner = 0.0;
    for (int l = -L; l <= L; ++l) {
      const auto slice = f.mode(kidx * lay.n_l() + static_cast<std::size_t>(l + L));
      bool nz = false;
      for (const auto& v : slice) nz = nz || v != cplx{0.0};
      if (nz) inner += cheb::eval(slice, s) * pt[static_cast<std::size_t>(l + L)];
    }
    if (inner != cplx{0.0}) {
      cplx e = 1.0;
      for (int j = 0; j < m; ++j) e *= pw[static_cast<std::size_t>(j * nk1 + digit[j])];
      acc += inner * e;
    }
    for (int j = m - 1; j >= 0; --j) {
      if (++digit[j] < nk1) break;
      digit[j] = 0;
    }
  }
  return acc;
}

cplx eval(const QPSeries& f, double x, double y, double t) {
  if (std::abs(y) > f.radius() * (1.0 + 1e-14)) {
    throw Error(ErrorKind::action_out_of_range,
                "|y| = " + std::to_string(std::abs(y)) + " exceeds radius " + std::to_string(f.radius()));
  }
  std::vector<cplx> theta(f.freq().omega.size());
  for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = f.freq().omega[j] * x;
  return eval_shell(f, theta, y, t);
}

QPSeries with_truncation(const QPSeries& f, const Truncation& trunc) {
  if (f.trunc() == trunc) return f;
  QPSeries out(f.freq(), trunc, f.radius(), f.parity());
  const ModeLayout& lay = f.layout();
  const std::size_t nc = std::min(lay.n_cheb(), out.layout().n_cheb());
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const auto k = lay.k_of(lay.kidx_of_mode(q));
    const std::size_t q2 = out.layout().mode_of(k, lay.l_of(q));
    if (q2 >= out.layout().n_modes()) continue;
    const auto src = f.mode(q);
    auto dst = out.mode(q2);
    for (std::size_t c = 0; c < nc; ++c) dst[c] = src[c];
  }
  return out;
}

QPSeries with_radius(const QPSeries& f, double r_new) {
  if (r_new == f.radius()) return f;
  if (!(r_new > 0.0)) throw Error(ErrorKind::invalid_argument, "radius must be positive");
  QPSeries out(f.freq(), f.trunc(), r_new, f.parity());
  const int n = static_cast<int>(f.layout().n_cheb());
  // Linear map old Chebyshev coefficients -> new ones, applied mode by mode.
  const auto s = cheb::nodes(n);
  std::vector<double> tmat(static_cast<std::size_t>(n * n));
  for (int j = 0; j < n; ++j) {
    const double z = r_new / f.radius() * s[j];
    double tm1 = 1.0, tc = z;
    for (int c = 0; c < n; ++c) {
      double v = c == 0 ? 1.0 : (c == 1 ? z : 2.0 * z * tc - tm1);
      if (c >= 2) {
        tm1 = tc;
        tc = v;
      }
      tmat[static_cast<std::size_t>(j * n + c)] = v;
    }
  }
  std::vector<cplx> vals(static_cast<std::size_t>(n));
  for (std::size_t q = 0; q < f.layout().n_modes(); ++q) {
    const auto src = f.mode(q);
    bool nz = false;
    for (const auto& v : src) nz = nz || v != cplx{0.0};
    if (!nz) continue;
    for (int j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (int c = 0; c < n; ++c) acc += src[c] * tmat[static_cast<std::size_t>(j * n + c)];
      vals[j] = acc;
    }
    cheb::analyse(vals, out.mode(q));
  }
  return out;
}

namespace {

QPSeries aligned(const QPSeries& g, const QPSeries& like) {
  require_same_frequency(like, g);
  return with_radius(with_truncation(g, like.trunc()), like.radius());
}

}  // namespace

QPSeries multiply(const QPSeries& f, const QPSeries& g, double* tail) {
  const QPSeries ga = aligned(g, f);
  const Parity p = parity_product(f.parity(), g.parity());
  if (f.is_zero() || ga.is_zero()) {
    if (tail) *tail = 0.0;
    return QPSeries::zeros_like(f, p);
  }
  const Collocation grid(f.freq(), f.trunc(), f.radius(), 2);
  auto a = grid.synthesize(f);
  const auto b = grid.synthesize(ga);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return grid.analyse(a, p, tail);
}

QPSeries algebra(const QPSeries& f, const QPSeries& g, AlgebraOp op) {
  if (op == AlgebraOp::mul) return multiply(f, g);
  const QPSeries ga = aligned(g, f);
  const Parity p = f.parity() == g.parity() ? f.parity() : Parity::none;
  QPSeries out = QPSeries::zeros_like(f, p);
  auto dst = out.data();
  const auto a = f.data();
  const auto b = ga.data();
  const double sign = op == AlgebraOp::add ? 1.0 : -1.0;
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a[i] + sign * b[i];
  return out;
}

QPSeries scaled(const QPSeries& f, cplx a) {
  QPSeries out = f;
  for (auto& v : out.data()) v *= a;
  return out;
}

QPSeries times_action(const QPSeries& f) {
  QPSeries out = QPSeries::zeros_like(f, f.parity());
  const std::size_t nc = f.layout().n_cheb();
  const double r = f.radius();
  for (std::size_t q = 0; q < f.layout().n_modes(); ++q) {
    const auto src = f.mode(q);
    auto dst = out.mode(q);
    // s T_0 = T_1, s T_n = (T_{n+1} + T_{n-1}) / 2
    for (std::size_t c = 0; c < nc; ++c) {
      if (src[c] == cplx{0.0}) continue;
      if (c == 0) {
        if (nc > 1) dst[1] += r * src[0];
      } else {
        dst[c - 1] += 0.5 * r * src[c];
        if (c + 1 < nc) dst[c + 1] += 0.5 * r * src[c];
      }
    }
  }
  return out;
}

QPSeries derivative(const QPSeries& f, Var wrt) {
  const ModeLayout& lay = f.layout();
  if (wrt == Var::y) {
    QPSeries out = QPSeries::zeros_like(f, f.parity());
    for (std::size_t q = 0; q < lay.n_modes(); ++q) {
      auto dst = out.mode(q);
      cheb::derivative(f.mode(q), dst);
      for (auto& v : dst) v /= f.radius();
    }
    return out;
  }
  QPSeries out = QPSeries::zeros_like(f, parity_flip(f.parity()));
  const auto kd = lay.k_dot(f.freq());
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const double factor = wrt == Var::x ? kd[lay.kidx_of_mode(q)] : static_cast<double>(lay.l_of(q));
    const cplx mul{0.0, factor};
    const auto src = f.mode(q);
    auto dst = out.mode(q);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] = mul * src[c];
  }
  return out;
}

namespace {

double weighted_majorant(const QPSeries& f, double r, const std::vector<double>& kweight, double s) {
  const ModeLayout& lay = f.layout();
  double acc = 0.0;
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const double sup = cheb::sup_bound(f.mode(q), f.radius(), r);
    if (sup == 0.0) continue;
    acc += sup * std::exp(s * (kweight[lay.kidx_of_mode(q)] + std::abs(lay.l_of(q))));
  }
  return acc;
}

void check_domain(const QPSeries& f, double s, double r) {
  if (!(s >= 0.0)) throw Error(ErrorKind::invalid_argument, "strip width must be nonnegative");
  if (!(r > 0.0) || r > f.radius() * (1.0 + 1e-12)) {
    throw Error(ErrorKind::action_out_of_range, "norm radius must lie in (0, stored radius]");
  }
}

}  // namespace

StripNorm strip_norm(const QPSeries& f, double s, double r) {
  check_domain(f, s, r);
  auto kd = f.layout().k_dot(f.freq());
  for (auto& v : kd) v = std::abs(v);
  return {s, r, weighted_majorant(f, r, kd, s)};
}

double shell_norm(const QPSeries& f, double s, double r) {
  check_domain(f, s, r);
  const auto l1 = f.layout().k_l1();
  std::vector<double> w(l1.begin(), l1.end());
  return weighted_majorant(f, r, w, s);
}

double reality_residual(const QPSeries& f) {
  const double mx = f.max_abs();
  if (mx == 0.0) return 0.0;
  const ModeLayout& lay = f.layout();
  double worst = 0.0;
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const auto a = f.mode(q);
    const auto b = f.mode(lay.neg(q));
    for (std::size_t c = 0; c < a.size(); ++c) worst = std::max(worst, std::abs(a[c] - std::conj(b[c])));
  }
  return worst / mx;
}

double parity_residual(const QPSeries& f, Parity p) {
  if (p == Parity::none) return 0.0;
  const double mx = f.max_abs();
  if (mx == 0.0) return 0.0;
  const ModeLayout& lay = f.layout();
  const double sign = p == Parity::even ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const auto a = f.mode(q);
    const auto b = f.mode(lay.neg(q));
    for (std::size_t c = 0; c < a.size(); ++c) worst = std::max(worst, std::abs(a[c] - sign * b[c]));
  }
  return worst / mx;
}

QPSeries symmetrized(const QPSeries& f, Parity p) {
  QPSeries out = QPSeries::zeros_like(f, p);
  const ModeLayout& lay = f.layout();
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const auto a = f.mode(q);
    const auto b = f.mode(lay.neg(q));
    auto dst = out.mode(q);
    for (std::size_t c = 0; c < a.size(); ++c) {
      switch (p) {
        case Parity::even: dst[c] = 0.5 * (a[c] + b[c]).real(); break;
        case Parity::odd: dst[c] = cplx{0.0, 0.5 * (a[c] - b[c]).imag()}; break;
        case Parity::none: dst[c] = 0.5 * (a[c] + std::conj(b[c])); break;
      }
    }
  }
  return out;
}

QPSeries at_action(const QPSeries& f, double y0) {
  if (std::abs(y0) > f.radius() * (1.0 + 1e-14)) {
    throw Error(ErrorKind::action_out_of_range, "action outside the series radius");
  }
  Truncation tr = f.trunc();
  tr.d_y = 0;
  QPSeries out(f.freq(), tr, f.radius(), f.parity());
  for (std::size_t q = 0; q < f.layout().n_modes(); ++q) out.mode(q)[0] = cheb::eval(f.mode(q), y0 / f.radius());
  return out;
}

double tail_majorant(const QPSeries& f, int n_from, double s, double r) {
  check_domain(f, s, r);
  const ModeLayout& lay = f.layout();
  const auto kd = lay.k_dot(f.freq());
  double acc = 0.0;
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const auto k = lay.k_of(lay.kidx_of_mode(q));
    int kmax = std::abs(lay.l_of(q));
    for (int v : k) kmax = std::max(kmax, std::abs(v));
    if (kmax < n_from) continue;
    const double sup = cheb::sup_bound(f.mode(q), f.radius(), r);
    acc += sup * std::exp(s * (std::abs(kd[lay.kidx_of_mode(q)]) + std::abs(lay.l_of(q))));
  }
  return acc;
}

QPSeries compose(const QPSeries& g, const QPSeries& sx, const QPSeries& sy, const ComposeOptions& opt,
                 double* residual) {
  require_same_frequency(g, sx);
  require_same_frequency(g, sy);
  const Parity p = g.parity();
  if (g.is_zero()) {
    if (residual) *residual = 0.0;
    return QPSeries(sx.freq(), sx.trunc(), sx.radius(), p);
  }
  const Collocation grid(sx.freq(), sx.trunc(), sx.radius(), opt.oversample);
  const auto vx = grid.synthesize(sx);
  const auto vy = grid.synthesize(sy);
  const GridEvaluator ev(g, grid);

  const auto& omega = g.freq().omega;
  const int m = grid.m();
  const std::size_t tor_n = grid.torus_size();
  // Oscillatory part of the x-shift: deviation from its torus mean at each y node.
  double max_wmega = 0.0;
  for (double w : omega) max_wmega = std::max(max_wmega, std::abs(w));
  const double margin = std::numbers::pi / (std::max(1, g.trunc().k_max) * max_wmega);
  double osc = 0.0;
  for (int iy = 0; iy < grid.n_y(); ++iy) {
    cplx mean = 0.0;
    for (std::size_t tor = 0; tor < tor_n; ++tor) mean += vx[iy * tor_n + tor];
    mean /= static_cast<double>(tor_n);
    for (std::size_t tor = 0; tor < tor_n; ++tor) osc = std::max(osc, std::abs(vx[iy * tor_n + tor] - mean));
  }
  if (osc >= 0.5 * margin) {
    throw Error(ErrorKind::shift_too_large, "oscillatory shift " + std::to_string(osc) +
                                                " exceeds half the Nyquist margin " + std::to_string(margin));
  }

  std::vector<cplx> out(grid.size());
  std::vector<cplx> theta(static_cast<std::size_t>(m));
  for (int iy = 0; iy < grid.n_y(); ++iy) {
    const double y = grid.y_node(iy);
    for (std::size_t tor = 0; tor < tor_n; ++tor) {
      const std::size_t idx = static_cast<std::size_t>(iy) * tor_n + tor;
      for (int j = 0; j < m; ++j) theta[j] = grid.theta(tor, j) + omega[j] * vx[idx];
      out[idx] = ev(grid.t_index(tor), theta, y + vy[idx]);
    }
  }
  double tail = 0.0;
  QPSeries res = grid.analyse(out, p, &tail);
  const double scale = shell_norm(g, 0.0, g.radius());
  if (residual) *residual = tail;
  if (tail > opt.tolerance * scale) {
    throw Error(ErrorKind::shift_too_large, "re-expansion residual " + std::to_string(tail / scale) +
                                                " exceeds tolerance " + std::to_string(opt.tolerance));
  }
  return res;
}

QPSeries compose_shift(const QPSeries& g, const QPSeries& shift, const ComposeOptions& opt) {
  const QPSeries sx = with_radius(with_truncation(shift, g.trunc()), g.radius());
  const QPSeries sy = QPSeries::zeros_like(sx, Parity::even);
  return compose(g, sx, sy, opt);
}

}  // namespace kamlab
