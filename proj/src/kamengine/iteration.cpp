#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kamlab/error.hpp"
#include "kamlab/kamengine.hpp"

namespace kamlab {

double IterationSchedule::s_sub(int n, double j) const {
  return s(n) - j / (100.0 * base.p) * (s(n) - s(n + 1));
}

double IterationSchedule::r_sub(int n, double j) const {
  return r(n) - j / (100.0 * base.p) * (r(n) - r(n + 1));
}

IterationSchedule schedule(double epsilon, double mu, int m, int n_max, double sigma) {
  if (sigma <= 0.0) sigma = m + mu / 100.0;
  IterationSchedule out;
  out.base = SmoothingSchedule::make(epsilon, mu, m, sigma, n_max);
  const double mt = out.base.mu_tilde;
  const double p = out.base.p;
  for (int n = 0; n <= n_max + 1; ++n) {
    out.tau_n.push_back(std::pow(epsilon, -std::pow(1.0 + mt, n - 1) * (1.0 + m / p) * mt));
  }
  return out;
}

IterationState IterationState::initial(const FrequencyData& freq, const Truncation& trunc, double r0) {
  IterationState st;
  st.pert = {QPSeries::zero(freq, trunc, r0, Parity::even), QPSeries::zero(freq, trunc, r0, Parity::odd)};
  st.U = QPSeries::zero(freq, trunc, r0, Parity::odd);
  st.V = QPSeries::zero(freq, trunc, r0, Parity::even);
  return st;
}

namespace {

QPSeries like(const QPSeries& f, const QPSeries& model) {
  QPSeries g = with_radius(with_truncation(f, model.trunc()), model.radius());
  g.set_parity(f.parity());
  return g;
}

// ∂_y a · ĝ + ∂_x a · f̂ + ∂_x a · y
QPSeries new_term(const QPSeries& a, const PerturbationPair& hat) {
  const QPSeries ax = derivative(a, Var::x);
  const QPSeries ay = derivative(a, Var::y);
  QPSeries acc = multiply(ay, hat.g_hat);
  acc = algebra(acc, multiply(ax, hat.f_hat), AlgebraOp::add);
  return algebra(acc, times_action(ax), AlgebraOp::add);
}

}  // namespace

IterationState kam_step(const IterationState& state, const PerturbationPair& incoming,
                        const DiophCertificate& cert, const IterationSchedule& sched, const KamOptions& opt) {
  const int n = state.n;
  if (n + 1 >= static_cast<int>(sched.base.r_n.size())) {
    throw Error(ErrorKind::invalid_argument, "schedule too short for step " + std::to_string(n));
  }
  incoming.validate();
  const double s1 = sched.s(n + 1), r1 = sched.r(n + 1);
  StepDiagnostics d;
  d.n = n;
  d.s = s1;
  d.r = r1;

  const PerturbationPair inc{like(incoming.f_hat, state.U), like(incoming.g_hat, state.U)};
  d.norm_incoming = norm(inc.f_hat, sched.s(n), sched.r(n)) + norm(inc.g_hat, sched.s(n), sched.r(n));
  double pull_res = 0.0;
  const PerturbationPair pulled = pullback(inc, state.U, state.V, opt.compose, &pull_res);
  const PerturbationPair hat{algebra(like(state.pert.f_hat, state.U), pulled.f_hat, AlgebraOp::add),
                             algebra(like(state.pert.g_hat, state.U), pulled.g_hat, AlgebraOp::add)};

  HomologicalReport hr;
  TransformPair star = solve_homological(hat, cert, &hr);
  d.min_divisor = hr.min_divisor;
  d.certificate_margin = hr.certificate_margin;
  d.dropped = hr.dropped;
  d.norm_u_star = norm(star.u, sched.s(n), sched.r(n));
  d.norm_v_star = norm(star.v, sched.s(n), sched.r(n));

  InversionReport ir;
  const TransformPair fwd = invert_transform(star, r1, &ir);
  d.inversion_sweeps = ir.sweeps;
  d.compatibility = ir.compatibility;
  d.parity_u = ir.parity_u;
  d.parity_v = ir.parity_v;
  d.norm_u = norm(fwd.u, s1, r1);
  d.norm_v = norm(fwd.v, s1, r1);

  const QPSeries F = new_term(star.u, hat);
  const QPSeries G = new_term(star.v, hat);
  double res_f = 0.0, res_g = 0.0, res_u = 0.0, res_v = 0.0;
  const QPSeries f_raw = compose(F, fwd.u, fwd.v, opt.compose, &res_f);
  const QPSeries g_raw = compose(G, fwd.u, fwd.v, opt.compose, &res_g);
  const QPSeries U_raw = compose(state.U, fwd.u, fwd.v, opt.compose, &res_u);
  const QPSeries V_raw = compose(state.V, fwd.u, fwd.v, opt.compose, &res_v);
  d.compose_residual = pull_res + res_f + res_g + res_u + res_v;
  d.parity_f = parity_residual(f_raw, Parity::even);
  d.parity_g = parity_residual(g_raw, Parity::odd);

  IterationState next;
  next.n = n + 1;
  next.pert = {symmetrized(f_raw, Parity::even), symmetrized(g_raw, Parity::odd)};
  next.U = symmetrized(algebra(fwd.u, U_raw, AlgebraOp::add), Parity::odd);
  next.V = symmetrized(algebra(fwd.v, V_raw, AlgebraOp::add), Parity::even);
  next.chain = state.chain;
  next.chain.push_back(fwd);
  next.history = state.history;
  next.warnings = state.warnings;

  d.norm_f_bar = norm(next.pert.f_hat, s1, r1);
  d.norm_g_bar = norm(next.pert.g_hat, s1, r1);
  const double eps = sched.base.epsilon;
  const double en = sched.eps(n);
  d.c_f = d.norm_f_bar / (eps * en);
  d.c_g = d.norm_g_bar / (eps * en * std::pow(sched.s(n), sched.base.m));
  if (d.c_f > opt.c_warn || d.c_g > opt.c_warn) {
    d.estimate_warning = true;
    next.warnings.push_back("step " + std::to_string(n) + ": estimate constants C_f = " + std::to_string(d.c_f) +
                            ", C_g = " + std::to_string(d.c_g) + " exceed " + std::to_string(opt.c_warn));
  }
  next.history.push_back(d);
  return next;
}

double composition_consistency(const IterationState& state, int samples_per_axis) {
  if (state.chain.empty()) return 0.0;
  const auto& omega = state.U.freq().omega;
  const int m = static_cast<int>(omega.size());
  const double r = state.U.radius();
  const int ns = samples_per_axis;
  std::vector<cplx> theta(static_cast<std::size_t>(m));
  auto at = [&](const QPSeries& f, double x, double y, double t) {
    for (int j = 0; j < m; ++j) theta[j] = omega[j] * x;
    return eval_shell(f, theta, y, t).real();
  };
  double worst = 0.0;
  for (int ix = 0; ix < ns; ++ix) {
    for (int iy = 0; iy < ns; ++iy) {
      for (int it = 0; it < ns; ++it) {
        const double x = 2.0 * std::numbers::pi * (ix + 0.37) / ns;
        const double y = 0.9 * r * (2.0 * (iy + 0.5) / ns - 1.0);
        const double t = 2.0 * std::numbers::pi * (it + 0.61) / ns;
        const double X = x + at(state.U, x, y, t);
        const double Y = y + at(state.V, x, y, t);
        double cx = x, cy = y;
        for (auto it_tp = state.chain.rbegin(); it_tp != state.chain.rend(); ++it_tp) {
          const double u = at(it_tp->u, cx, cy, t);
          const double v = at(it_tp->v, cx, cy, t);
          cx += u;
          cy += v;
        }
        worst = std::max({worst, std::abs(cx - X), std::abs(cy - Y)});
      }
    }
  }
  return worst;
}

RunResult run(const PerturbationPair& initial, const DiophCertificate& cert, const RunConfig& config) {
  require_same_frequency(initial.f_hat, initial.g_hat);
  initial.validate();
  if (config.n_max < 1) throw Error(ErrorKind::invalid_argument, "n_max must be >= 1");
  const FrequencyData& freq = initial.f_hat.freq();
  RunResult out;
  out.sched = schedule(config.epsilon, config.mu, freq.m(), config.n_max, config.sigma);
  const IterationSchedule& sched = out.sched;
  const double r0 = sched.r(0);
  const Truncation trunc = initial.f_hat.trunc();

  QPSeries f = with_radius(with_truncation(initial.f_hat, trunc), r0);
  QPSeries g = with_radius(with_truncation(initial.g_hat, trunc), r0);
  f.set_parity(Parity::even);
  g.set_parity(Parity::odd);
  const auto fp = dyadic_decompose(f, sched.base, config.n_max, config.kernel);
  const auto gp = dyadic_decompose(g, sched.base, config.n_max, config.kernel);

  IterationState st = IterationState::initial(freq, trunc, r0);
  int rises = 0;
  double last = HUGE_VAL;
  for (int n = 0; n < config.n_max; ++n) {
    st = kam_step(st, {fp[static_cast<std::size_t>(n)], gp[static_cast<std::size_t>(n)]}, cert, sched,
                  config.options);
    const StepDiagnostics& d = st.history.back();
    if (d.norm_f_bar > last) {
      if (++rises >= 2) {
        throw Error(ErrorKind::divergence_detected,
                    "norm of the new perturbation grew at two consecutive steps (step " + std::to_string(n) + ")");
      }
    } else {
      rises = 0;
    }
    last = d.norm_f_bar;
    double pending = 0.0;
    for (int j = n + 1; j <= config.n_max; ++j) {
      pending += norm(fp[static_cast<std::size_t>(j)], 0.0, r0) + norm(gp[static_cast<std::size_t>(j)], 0.0, r0);
    }
    if (d.norm_f_bar < config.target && d.norm_g_bar < config.target && pending < config.target) {
      out.converged = true;
      break;
    }
  }

  InvariantCurve& c = out.curve;
  c.X = at_action(st.U, 0.0);
  c.Y = at_action(st.V, 0.0);
  const double sN = sched.s(st.n);
  c.deviation = std::max(norm(c.X, sN, c.X.radius()), norm(c.Y, sN, c.Y.radius()));
  const std::vector<int> k0(static_cast<std::size_t>(freq.m()), 0);
  c.gamma = freq.gamma + at_action(st.pert.f_hat, 0.0).mode(k0, 0)[0].real();
  out.state = std::move(st);
  return out;
}

std::pair<double, double> eval_curve(const InvariantCurve& c, double x, double t) {
  return {x + eval(c.X, x, 0.0, t).real(), eval(c.Y, x, 0.0, t).real()};
}

}  // namespace kamlab
