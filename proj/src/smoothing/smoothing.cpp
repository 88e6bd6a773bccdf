#include "kamlab/smoothing.hpp"

#include <cmath>
#include <numbers>

#include "kamlab/error.hpp"

namespace kamlab {

namespace {

double glue(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace

double KernelProfile::operator()(double rho) const {
  rho = std::abs(rho);
  if (rho <= 0.5 * a) return 1.0;
  if (rho >= a) return 0.0;
  const double u = (rho - 0.5 * a) / (0.5 * a);
  const double lo = glue(1.0 - u), hi = glue(u);
  return lo / (lo + hi);
}

double KernelProfile::kernel(double w, int nodes) const {
  // Trapezoid on [0, a]: the integrand is even at 0 and flat at a, so the
  // endpoint corrections vanish to all orders.
  const double h = a / nodes;
  double acc = 0.5;
  for (int j = 1; j < nodes; ++j) {
    const double xi = j * h;
    acc += (*this)(xi)*std::cos(xi * w);
  }
  return acc * h / std::numbers::pi;
}

SmoothingSchedule SmoothingSchedule::make(double epsilon, double mu, int m, double sigma, int n_max) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::invalid_argument, "epsilon must lie in (0, 1)");
  if (!(mu > 0.0)) throw Error(ErrorKind::invalid_argument, "mu must be positive");
  if (m < 1 || n_max < 0) throw Error(ErrorKind::invalid_argument, "invalid schedule size");
  SmoothingSchedule s;
  s.epsilon = epsilon;
  s.mu = mu;
  s.sigma = sigma;
  s.m = m;
  s.p = 2.0 * m + 1.0 + mu;
  s.mu_tilde = mu / (100.0 * (2.0 * sigma + 1.0 + mu));
  const double log_eps = std::log(epsilon);
  for (int n = 0; n <= n_max + 1; ++n) {
    const double le = log_eps * std::pow(1.0 + s.mu_tilde, n);
    s.eps_n.push_back(std::exp(le));
    const double sn = std::exp(le / s.p);
    s.s_n.push_back(sn);
    s.r_n.push_back(std::pow(sn, m + 1.0 + mu / 10.0));
  }
  if (s.s_n[0] > 0.5) {
    throw Error(ErrorKind::degenerate_schedule, "s_0 = " + std::to_string(s.s_n[0]) + " exceeds 1/2");
  }
  return s;
}

QPSeries smooth(const QPSeries& f, double delta, const KernelProfile& kernel) {
  if (!(delta > 0.0)) throw Error(ErrorKind::invalid_argument, "delta must be positive");
  QPSeries out = f;
  const ModeLayout& lay = f.layout();
  const auto kd = lay.k_dot(f.freq());
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const double kw = kd[lay.kidx_of_mode(q)];
    const double l = lay.l_of(q);
    const double c = kernel(delta * std::hypot(kw, l));
    if (c == 1.0) continue;
    for (auto& v : out.mode(q)) v *= c;
  }
  return out;
}

std::vector<QPSeries> dyadic_decompose(const QPSeries& f, const SmoothingSchedule& sched, int n,
                                       const KernelProfile& kernel) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "N must be >= 1");
  if (static_cast<int>(sched.s_n.size()) <= n) throw Error(ErrorKind::invalid_argument, "schedule too short");
  std::vector<QPSeries> out;
  QPSeries prev = smooth(f, sched.s_n[0], kernel);
  out.push_back(prev);
  for (int j = 1; j <= n; ++j) {
    QPSeries cur = smooth(f, sched.s_n[static_cast<std::size_t>(j)], kernel);
    QPSeries piece = algebra(cur, prev, AlgebraOp::sub);
    piece.set_parity(f.parity());
    out.push_back(std::move(piece));
    prev = std::move(cur);
  }
  return out;
}

double LacunaryProbe::value(double x) const {
  double acc = 0.0;
  for (int j = 0; j <= terms; ++j) acc += std::exp2(-p * j) * std::cos(std::ldexp(x, j));
  return acc;
}

double LacunaryProbe::smoothed(double x, double delta, const KernelProfile& kernel) const {
  double acc = 0.0;
  for (int j = 0; j <= terms; ++j) {
    const double c = kernel(delta * std::exp2(j));
    if (c != 0.0) acc += c * std::exp2(-p * j) * std::cos(std::ldexp(x, j));
  }
  return acc;
}

double LacunaryProbe::sup_error(double delta, const KernelProfile& kernel, int grid) const {
  double mx = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double x = 2.0 * std::numbers::pi * i / grid;
    double acc = 0.0;
    for (int j = 0; j <= terms; ++j) {
      const double c = kernel(delta * std::exp2(j));
      if (c != 1.0) acc += (c - 1.0) * std::exp2(-p * j) * std::cos(std::ldexp(x, j));
    }
    mx = std::max(mx, std::abs(acc));
  }
  return mx;
}

DecayProbeResult error_decay_probe(double p_test, const std::vector<double>& deltas, const KernelProfile& kernel) {
  if (deltas.size() < 4) throw Error(ErrorKind::fit_degenerate, "need at least 4 deltas");
  if (!(p_test > 0.0 && p_test <= 6.0)) throw Error(ErrorKind::invalid_argument, "p_test must lie in (0, 6]");
  const LacunaryProbe probe{p_test, 40};
  DecayProbeResult res;
  res.deltas = deltas;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double d : deltas) {
    if (!(d > 0.0)) throw Error(ErrorKind::invalid_argument, "deltas must be positive");
    const double e = probe.sup_error(d, kernel);
    if (!(e > 0.0)) throw Error(ErrorKind::fit_degenerate, "zero smoothing error at delta " + std::to_string(d));
    res.errors.push_back(e);
    const double lx = std::log(d), ly = std::log(e);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(deltas.size());
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 1e-12)) throw Error(ErrorKind::fit_degenerate, "deltas do not spread in log scale");
  res.slope = (n * sxy - sx * sy) / den;
  res.intercept = (sy - res.slope * sx) / n;
  return res;
}

}  // namespace kamlab
