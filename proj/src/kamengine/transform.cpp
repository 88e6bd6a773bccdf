#include <algorithm>
#include <cmath>
#include <string>

#include "kamlab/collocation.hpp"
#include "kamlab/error.hpp"
#include "kamlab/kamengine.hpp"

namespace kamlab {

namespace {

double derivative_bound(const QPSeries& f) {
  const double r = f.radius();
  return norm(derivative(f, Var::x), 0.0, r) + norm(derivative(f, Var::y), 0.0, r);
}

}  // namespace

TransformPair invert_transform(const TransformPair& inv, double r, InversionReport* report) {
  require_same_frequency(inv.u, inv.v);
  if (inv.direction != TransformDirection::inverse) {
    throw Error(ErrorKind::invalid_argument, "invert_transform expects an inverse-direction pair");
  }
  const double lip = std::max(derivative_bound(inv.u), derivative_bound(inv.v));
  if (!(lip < 0.5)) {
    throw Error(ErrorKind::contraction_failure,
                "derivative majorant " + std::to_string(lip) + " of the inverse transform is not below 1/2");
  }
  const Collocation grid(inv.u.freq(), inv.u.trunc(), r);
  const GridEvaluator ev_u(inv.u, grid);
  const GridEvaluator ev_v(inv.v, grid);
  const auto& omega = inv.u.freq().omega;
  const int m = grid.m();
  const std::size_t tor_n = grid.torus_size();
  const std::size_t n = grid.size();

  std::vector<cplx> du(n, cplx{0.0}), dv(n, cplx{0.0});
  std::vector<cplx> theta(static_cast<std::size_t>(m));
  auto at = [&](std::size_t idx, const GridEvaluator& ev) {
    const std::size_t tor = idx % tor_n;
    const auto iy = static_cast<int>(idx / tor_n);
    for (int j = 0; j < m; ++j) theta[j] = grid.theta(tor, j) + omega[j] * du[idx];
    return ev(grid.t_index(tor), theta, grid.y_node(iy) + dv[idx]);
  };

  int sweeps = 0;
  double prev = HUGE_VAL;
  for (;;) {
    if (++sweeps > 100) throw Error(ErrorKind::contraction_failure, "fixed point not reached in 100 sweeps");
    double change = 0.0, scale = 0.0;
    std::vector<cplx> nu(n), nv(n);
    for (std::size_t idx = 0; idx < n; ++idx) {
      nu[idx] = -at(idx, ev_u);
      nv[idx] = -at(idx, ev_v);
      change = std::max({change, std::abs(nu[idx] - du[idx]), std::abs(nv[idx] - dv[idx])});
      scale = std::max({scale, std::abs(nu[idx]), std::abs(nv[idx])});
    }
    du.swap(nu);
    dv.swap(nv);
    if (change <= 1e-14 * scale) break;
    // Rounding floor: the update stopped shrinking at a negligible size.
    if (sweeps > 2 && change >= prev && change <= 1e-11 * scale) break;
    prev = change;
  }

  double tail_u = 0.0, tail_v = 0.0;
  const QPSeries raw_u = grid.analyse(du, inv.u.parity(), &tail_u);
  const QPSeries raw_v = grid.analyse(dv, inv.v.parity(), &tail_v);
  TransformPair out{symmetrized(raw_u, inv.u.parity()), symmetrized(raw_v, inv.v.parity()),
                    TransformDirection::forward};

  if (report) {
    const auto su = grid.synthesize(out.u);
    const auto sv = grid.synthesize(out.v);
    double compat = 0.0;
    for (std::size_t idx = 0; idx < n; ++idx) {
      compat = std::max({compat, std::abs(at(idx, ev_u) + su[idx]), std::abs(at(idx, ev_v) + sv[idx])});
    }
    report->sweeps = sweeps;
    report->compatibility = compat;
    report->analysis_tail = tail_u + tail_v;
    report->parity_u = inv.u.parity() == Parity::none ? 0.0 : parity_residual(raw_u, inv.u.parity());
    report->parity_v = inv.v.parity() == Parity::none ? 0.0 : parity_residual(raw_v, inv.v.parity());
  }
  return out;
}

PerturbationPair pullback(const PerturbationPair& in, const QPSeries& U, const QPSeries& V,
                          const ComposeOptions& opt, double* residual) {
  require_same_frequency(in.f_hat, U);
  require_same_frequency(in.g_hat, U);
  PerturbationPair out{QPSeries::zeros_like(U, Parity::even), QPSeries::zeros_like(U, Parity::odd)};
  if (residual) *residual = 0.0;
  if (in.f_hat.is_zero() && in.g_hat.is_zero()) return out;

  const Collocation grid(U.freq(), U.trunc(), U.radius(), opt.oversample);
  const auto u = grid.synthesize(U);
  const auto v = grid.synthesize(V);
  const auto ux = grid.synthesize(derivative(U, Var::x));
  const auto uy = grid.synthesize(derivative(U, Var::y));
  const auto vx = grid.synthesize(derivative(V, Var::x));
  const auto vy = grid.synthesize(derivative(V, Var::y));
  const GridEvaluator ev_f(in.f_hat, grid);
  const GridEvaluator ev_g(in.g_hat, grid);
  const auto& omega = U.freq().omega;
  const int m = grid.m();
  const std::size_t tor_n = grid.torus_size();

  std::vector<cplx> pf(grid.size()), pg(grid.size());
  std::vector<cplx> theta(static_cast<std::size_t>(m));
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const std::size_t tor = idx % tor_n;
    const auto iy = static_cast<int>(idx / tor_n);
    for (int j = 0; j < m; ++j) theta[j] = grid.theta(tor, j) + omega[j] * u[idx];
    const cplx y = grid.y_node(iy) + v[idx];
    const cplx fv = ev_f(grid.t_index(tor), theta, y);
    const cplx gv = ev_g(grid.t_index(tor), theta, y);
    const cplx a = 1.0 + ux[idx], b = uy[idx], c = vx[idx], d = 1.0 + vy[idx];
    const cplx det = a * d - b * c;
    pf[idx] = (d * fv - b * gv) / det;
    pg[idx] = (a * gv - c * fv) / det;
  }
  double tf = 0.0, tg = 0.0;
  out.f_hat = symmetrized(grid.analyse(pf, Parity::even, &tf), Parity::even);
  out.g_hat = symmetrized(grid.analyse(pg, Parity::odd, &tg), Parity::odd);
  const double scale = shell_norm(in.f_hat, 0.0, in.f_hat.radius()) + shell_norm(in.g_hat, 0.0, in.g_hat.radius());
  if (residual) *residual = tf + tg;
  if (tf + tg > opt.tolerance * scale) {
    throw Error(ErrorKind::shift_too_large, "pullback re-expansion residual " + std::to_string((tf + tg) / scale) +
                                                " exceeds tolerance " + std::to_string(opt.tolerance));
  }
  return out;
}

}  // namespace kamlab
