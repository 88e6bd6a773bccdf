#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "kamlab/dioph.hpp"
#include "kamlab/dynlab.hpp"
#include "kamlab/homsolve.hpp"
#include "kamlab/kamengine.hpp"
#include "kamlab/smoothing.hpp"
#include "support.hpp"

using namespace kamlab;
using kamlab::testing::random_series;

namespace {

constexpr double pi = std::numbers::pi;
const std::vector<int> k1{1};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ---------------------------------------------------------------- 1

Outcome homological_residual() {
  const FrequencyData fr{{1.0, std::numbers::sqrt2}, std::sqrt(3.0) - 1.0};
  const auto cert = certify(fr, 2.01, 200);
  std::mt19937_64 rng(2024);
  double worst = 0.0, worst_point = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const PerturbationPair p{random_series(fr, {6, 6, 3}, 0.2, 10, Parity::even, rng),
                             random_series(fr, {6, 6, 3}, 0.2, 10, Parity::odd, rng)};
    const auto tp = solve_homological(p, cert);
    const double scale = norm(p.f_hat, 0.0, 0.2) + norm(p.g_hat, 0.0, 0.2);
    const auto res = residual(p, tp);
    worst = std::max({worst, res.first / scale, res.second / scale});
    // pointwise: γ u*_x + u*_t + f̂ - v* and γ v*_x + v*_t + ĝ at scattered points
    const QPSeries ux = derivative(tp.u, Var::x), ut = derivative(tp.u, Var::t);
    const QPSeries vx = derivative(tp.v, Var::x), vt = derivative(tp.v, Var::t);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi), act(-0.2, 0.2);
    for (int j = 0; j < 4; ++j) {
      const double x = ang(rng), y = act(rng), t = ang(rng);
      const double r1 = fr.gamma * eval(ux, x, y, t).real() + eval(ut, x, y, t).real() + eval(p.f_hat, x, y, t).real() -
                        eval(tp.v, x, y, t).real();
      const double r2 = fr.gamma * eval(vx, x, y, t).real() + eval(vt, x, y, t).real() + eval(p.g_hat, x, y, t).real();
      worst_point = std::max({worst_point, std::abs(r1) / scale, std::abs(r2) / scale});
    }
  }
  return {worst <= 1e-12 && worst_point <= 1e-12,
          fmt("max relative residual %.3g (norm), %.3g (pointwise)", worst, worst_point)};
}

// ---------------------------------------------------------------- 2, 3

const FrequencyData fr1{{1.0}, std::numbers::sqrt2};
const Truncation tr1{8, 8, 8};

PerturbationPair zero_pair(double r) {
  return {QPSeries::zero(fr1, tr1, r, Parity::even), QPSeries::zero(fr1, tr1, r, Parity::odd)};
}

Outcome parity_end_to_end() {
  const auto cert = certify(fr1, 1.0001, 200);
  const auto sched = schedule(1e-3, 0.01, 1, 4);
  PerturbationPair in = zero_pair(sched.r(0));
  in.f_hat.add_cos(k1, 1, 1e-3);
  in.f_hat.add_cos(k1, -2, 5e-4, std::vector<double>{0.0, 1.0});
  in.g_hat.add_sin(k1, 1, 1e-3, std::vector<double>{1.0, 2.0});
  auto st = IterationState::initial(fr1, tr1, sched.r(0));
  double worst = 0.0;
  bool tags = true;
  for (int n = 0; n < 4; ++n) {
    st = kam_step(st, n == 0 ? in : zero_pair(sched.r(n)), cert, sched);
    const auto& d = st.history.back();
    worst = std::max({worst, d.parity_f, d.parity_g, parity_residual(st.pert.f_hat, Parity::even),
                      parity_residual(st.pert.g_hat, Parity::odd)});
    tags = tags && st.pert.f_hat.parity() == Parity::even && st.pert.g_hat.parity() == Parity::odd;
  }
  return {worst <= 1e-12 && tags && st.history.size() == 4, fmt("4 steps, max parity residual %.3g", worst)};
}

Outcome contraction() {
  const auto t0 = std::chrono::steady_clock::now();
  PerturbationPair p = zero_pair(0.02);
  p.f_hat.add_cos(k1, 1, 1e-3);
  RunConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.mu = 0.01;
  const auto res = run(p, certify(fr1, 1.0001, 200), cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& h = res.state.history;
  if (h.size() < 4) return {false, "fewer than 4 steps recorded"};
  bool ok = h[2].norm_f_bar <= 1e-9 && secs < 60.0;
  double worst_margin = INFINITY;
  for (std::size_t n = 1; n <= 3; ++n) {
    const double bound = std::pow(h[n - 1].norm_f_bar, 1.2);
    ok = ok && h[n].norm_f_bar <= bound;
    worst_margin = std::min(worst_margin, bound / std::max(h[n].norm_f_bar, 1e-300));
  }
  return {ok, fmt("|f_3| = %.3g, min bound/|f_n+1| = %.3g, %.1f s", h[2].norm_f_bar, worst_margin, secs)};
}

// ---------------------------------------------------------------- 4

Outcome smoothing_decay() {
  const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625};
  bool ok = true;
  std::ostringstream os;
  for (double p : {1.0, 2.5, 4.0}) {
    const auto r = error_decay_probe(p, deltas);
    ok = ok && std::abs(r.slope - p) <= 0.3;
    os << "p=" << p << " slope " << fmt("%.4f", r.slope) << "; ";
  }
  return {ok, os.str() + std::to_string(deltas.size()) + " deltas"};
}

// ---------------------------------------------------------------- 5

Outcome divisor_sum_criterion() {
  const auto t0 = std::chrono::steady_clock::now();
  const double sigma = 1.01;
  const auto cert = certify(fr1, sigma, 1000);
  bool ok = true;
  double worst = 0.0;
  for (int nu = 1; nu <= 50; ++nu) {
    double brute = 0.0;
    for (int k = -nu; k <= nu; ++k) {
      if (k == 0) continue;
      const int lmax = nu - std::abs(k);
      for (int l = -lmax; l <= lmax; ++l) {
        const double d = k * std::numbers::sqrt2 + l;
        brute += 1.0 / (d * d);
      }
    }
    const double lib = divisor_sum(fr1, nu);
    const double bound = pi * pi / 8.0 * 81.0 * std::pow(cert.c0, -2.0) * std::pow(nu, 2 * sigma);
    ok = ok && std::abs(lib - brute) <= 1e-10 * brute && brute <= bound &&
         std::abs(divisor_sum_bound(1, cert.c0, sigma, nu) - bound) <= 1e-12 * bound;
    worst = std::max(worst, brute / bound);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok && secs < 1.0, fmt("c0 = %.6f, max sum/bound = %.3g, %.3f s", cert.c0, worst, secs)};
}

// ---------------------------------------------------------------- 6

Outcome bessel() {
  const FrequencyData fr{{1.0, std::numbers::sqrt2}, std::sqrt(3.0) - 1.0};
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const QPSeries f = random_series(fr, {3, 3, 2}, 0.1, 8, Parity::none, rng);
    for (double s : {0.1, 0.3}) {
      const auto b = bessel_check(f, s);
      worst = std::max(worst, b.lhs / b.rhs);
    }
  }
  // rhs already carries the factor 2^{m+1}
  return {worst <= 1.0, fmt("max lhs / (2^{m+1} sup^2) = %.3g over 100 checks", worst)};
}

// ---------------------------------------------------------------- 7

QPSeries x_series(const FrequencyData& fr, int K, Parity p) { return QPSeries::zero(fr, {K, 0, 0}, 1.0, p); }

Outcome reversibility() {
  const FrequencyData f1{{1.0}, 0.0}, f2{{1.0, std::numbers::sqrt2}, 0.0};
  std::vector<std::pair<std::string, ReversibleMapSpec>> specs;

  ReversibleMapSpec m;
  m.family = MapFamily::M;
  m.gamma = 2 * pi * (std::sqrt(5.0) - 1) / 2;
  m.kick = x_series(f1, 2, Parity::odd);
  m.kick.add_sin(k1, 0, 0.05);
  m.kick.add_sin(std::vector<int>{2}, 0, 0.01);
  specs.emplace_back("M", m);

  ReversibleMapSpec m1 = m;
  m1.family = MapFamily::M1;
  m1.delta = 0.3;
  specs.emplace_back("M1", m1);

  ReversibleMapSpec m2 = m1;
  m2.family = MapFamily::M2;
  const std::vector<cplx> h{0.0, 1.0, 0.0, 0.5};
  m2.twist = YPoly::from_monomial(h, 3, 1.0);
  specs.emplace_back("M2", m2);

  ReversibleMapSpec md;
  md.family = MapFamily::M_delta;
  md.gamma = 0.7;
  md.delta = 0.1;
  md.kick = x_series(f2, 1, Parity::odd);
  md.kick.add_sin(std::vector<int>{1, 0}, 0, 0.2);
  md.kick.add_sin(std::vector<int>{0, 1}, 0, 0.1);
  md.u0 = x_series(f2, 1, Parity::odd);
  md.u0.add_sin(std::vector<int>{1, 1}, 0, 0.2);
  md.v0 = x_series(f2, 1, Parity::even);
  md.v0.add_cos(std::vector<int>{0, 1}, 0, 0.1);
  specs.emplace_back("M_delta", md);

  bool ok = true;
  std::ostringstream os;
  for (const auto& [name, s] : specs) {
    const double r = ReversibleMap(s).reversibility_residual(32);
    ok = ok && r <= 1e-9;
    os << name << " " << fmt("%.2g", r) << "; ";
  }
  return {ok, os.str()};
}

// ---------------------------------------------------------------- 8-10

OscillatorSpec arctan_oscillator(double omega, bool forced) {
  OscillatorSpec s;
  s.omega0 = omega;
  s.phi = ScalarFunction::from_name("arctan");
  s.f_damp = ScalarFunction::from_name("arctan_square");
  s.g_nl = ScalarFunction::from_name("tanh");
  if (forced) {
    s.p_force = QPSeries::zero({{std::numbers::sqrt2, std::sqrt(3.0)}, 1.0 / omega}, {2, 0, 0}, 1.0, Parity::even);
    s.p_force.add_cos(std::vector<int>{1, 0}, 0, 0.5);
    s.p_force.add_cos(std::vector<int>{0, 1}, 0, 0.5);
  }
  return s;
}

DiophCertificate forcing_cert(const OscillatorSpec& s) {
  return certify({s.p_force.freq().omega, 1.0 / s.omega0}, 2.01, 40);
}

Outcome s3_equation() {
  const auto s = arctan_oscillator(1.0, true);
  const auto s3 = solve_s3(s, forcing_cert(s));
  const double r = s3_residual(s, s3, 64);
  return {r <= 1e-10, fmt("grid residual %.3g, min divisor %.4f", r, s3.min_divisor)};
}

Outcome twist() {
  bool ok = true;
  double worst = 0.0;
  for (double w : {1.0, 0.7, 2.0}) {
    const auto s = arctan_oscillator(w, false);
    // limits φ(±∞) = ±π/2, f(+∞) = π/2, g(±∞) = ±1
    const double direct = -2.0 / (w * w * w) * ((pi / 2 - (-pi / 2)) * (pi / 2) + (1.0 - (-1.0)));
    const double closed = -(pi * pi + 4) / (w * w * w);
    const auto t = twist_coefficient(s);
    const double e = std::max(std::abs(t.gamma1 - direct), std::abs(direct - closed)) / std::abs(closed);
    worst = std::max(worst, e);
    ok = ok && e <= 1e-12 && !t.zero_twist;
  }
  const auto s = arctan_oscillator(1.0, false);
  const double lim = (1 / pi) * (pi / 2 - (-pi / 2)) * (pi / 2);
  const double rel = std::abs(1000.0 * j1(s, 1000.0) - lim) / lim;
  return {ok && rel <= 1e-2, fmt("gamma1 rel err %.2g; lambda J1 rel err %.3g at lambda=1e3", worst, rel)};
}

Outcome boundedness() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = arctan_oscillator(1.0, true);
  forcing_cert(s);
  const auto orb = oscillator_poincare(s, {50.0, 0.0}, 100000);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double ratio = orb.action_max / orb.action_min;
  const bool ok = !orb.escaped && orb.iterations == 100000 && ratio <= 2.0 && secs < 600.0;
  return {ok, std::to_string(orb.iterations) + fmt(" returns, r in [%.3f, %.3f]", orb.action_min, orb.action_max) +
                  fmt(", ratio %.4f, %.1f s", ratio, secs) + (orb.escaped ? ", escaped" : "")};
}

// ---------------------------------------------------------------- 11

Outcome preconditioner() {
  const FrequencyData f2{{1.0, std::numbers::sqrt2}, 0.0};
  ReversibleMapSpec md;
  md.family = MapFamily::M_delta;
  md.gamma = 0.7;
  md.delta = 0.1;
  md.radius = 0.5;
  const std::vector<cplx> h{0.0, 1.0, 0.0, 0.5};
  md.twist = YPoly::from_monomial(h, 3, 0.5);
  md.kick = x_series(f2, 3, Parity::odd);
  md.kick.add_sin(std::vector<int>{1, 0}, 0, 0.2);
  md.kick.add_sin(std::vector<int>{3, -1}, 0, 0.02);
  md.u0 = x_series(f2, 3, Parity::odd);
  md.u0.add_sin(std::vector<int>{1, 1}, 0, 0.2);
  md.u0.add_sin(std::vector<int>{2, 3}, 0, 0.03);
  md.v0 = x_series(f2, 3, Parity::even);
  md.v0.add_cos(std::vector<int>{0, 1}, 0, 0.1);
  md.v0.add_cos(std::vector<int>{3, 2}, 0, 0.01);
  const auto [l1, l2] = small_twist_terms(md, {3, 0, 3});
  const auto pc = small_twist_precondition(l1, l2, md.gamma, 3);
  const double tiny = 64 * std::numeric_limits<double>::epsilon();
  const bool r_ok = pc.r1 <= pc.tail1 * (1 + tiny) + tiny * norm(l1, 0.0, md.radius) &&
                    pc.r2 <= pc.tail2 * (1 + tiny) + tiny * norm(l2, 0.0, md.radius);
  return {r_ok && pc.tail1 > 0.0 && pc.min_twist > 0.0,
          fmt("R1 %.3g <= tail %.3g; ", pc.r1, pc.tail1) + fmt("R2 %.3g <= tail %.3g; min h' %.4f", pc.r2, pc.tail2, pc.min_twist)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"homological residual", homological_residual},
      {"parity preservation", parity_end_to_end},
      {"contraction", contraction},
      {"smoothing decay", smoothing_decay},
      {"small-divisor sum bound", divisor_sum_criterion},
      {"Bessel inequality", bessel},
      {"map reversibility", reversibility},
      {"S3 equation", s3_equation},
      {"twist coefficient", twist},
      {"boundedness", boundedness},
      {"preconditioner", preconditioner}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
