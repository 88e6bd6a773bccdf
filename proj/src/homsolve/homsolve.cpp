#include "kamlab/homsolve.hpp"

#include <cmath>
#include <limits>

#include "kamlab/error.hpp"

namespace kamlab {

namespace {

constexpr double divisor_floor = 1e-14;
constexpr double parity_tolerance = 1e-12;

void check_piece(const QPSeries& f, Parity want, const char* name) {
  if (f.parity() != want) {
    throw Error(ErrorKind::parity_violation,
                std::string(name) + " must be tagged " + to_string(want) + ", got " + to_string(f.parity()));
  }
  const double pr = parity_residual(f, want);
  const double rr = reality_residual(f);
  if (pr > parity_tolerance || rr > parity_tolerance) {
    throw Error(ErrorKind::parity_violation, std::string(name) + " violates its symmetry (residual " +
                                                 std::to_string(std::max(pr, rr)) + ")");
  }
}

}  // namespace

void PerturbationPair::validate() const {
  require_same_frequency(f_hat, g_hat);
  check_piece(f_hat, Parity::even, "f_hat");
  check_piece(g_hat, Parity::odd, "g_hat");
}

TransformPair solve_homological(const PerturbationPair& pert, const DiophCertificate& cert,
                                HomologicalReport* report) {
  pert.validate();
  const QPSeries& f = pert.f_hat;
  const QPSeries g = with_radius(with_truncation(pert.g_hat, f.trunc()), f.radius());
  const ModeLayout& lay = f.layout();
  const FrequencyData& freq = f.freq();
  const auto kd = lay.k_dot(freq);

  TransformPair tp{QPSeries::zeros_like(f, Parity::odd), QPSeries::zeros_like(f, Parity::even),
                   TransformDirection::inverse};
  HomologicalReport rep;
  rep.min_divisor = std::numeric_limits<double>::infinity();
  rep.certificate_margin = std::numeric_limits<double>::infinity();
  const cplx I{0.0, 1.0};
  const std::size_t nc = lay.n_cheb();
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const auto k = lay.k_of(lay.kidx_of_mode(q));
    const int l = lay.l_of(q);
    int kabs = 0;
    for (int v : k) kabs = std::max(kabs, std::abs(v));
    const auto fs = f.mode(q);
    const auto gs = g.mode(q);
    auto us = tp.u.mode(q);
    auto vs = tp.v.mode(q);
    if (kabs == 0 && l == 0) {
      for (std::size_t c = 0; c < nc; ++c) vs[c] = fs[c];
      continue;
    }
    if (kabs > cert.k_checked) {
      rep.dropped += cheb::sup_bound(fs, f.radius(), f.radius()) + cheb::sup_bound(gs, g.radius(), g.radius());
      continue;
    }
    const double d = kd[lay.kidx_of_mode(q)] * freq.gamma + l;
    if (std::abs(d) < divisor_floor) {
      throw Error(ErrorKind::divisor_underflow, "divisor " + std::to_string(d) + " below 1e-14");
    }
    rep.min_divisor = std::min(rep.min_divisor, std::abs(d));
    if (kabs > 0 && cert.c0 > 0.0) {
      rep.certificate_margin = std::min(rep.certificate_margin, std::abs(d) / cert.lower_bound(kabs));
    }
    ++rep.solved_modes;
    for (std::size_t c = 0; c < nc; ++c) {
      vs[c] = I * gs[c] / d;
      us[c] = I * (fs[c] - vs[c]) / d;
    }
  }
  if (report) *report = rep;
  return tp;
}

HomologicalResidual residual(const PerturbationPair& pert, const TransformPair& tp, double s) {
  const double gamma = pert.f_hat.freq().gamma;
  const QPSeries& f = pert.f_hat;
  auto lhs = [&](const QPSeries& w, const QPSeries& rest) {
    QPSeries out = algebra(scaled(derivative(w, Var::x), gamma), derivative(w, Var::t), AlgebraOp::add);
    return algebra(out, rest, AlgebraOp::add);
  };
  const QPSeries r1 = lhs(tp.u, algebra(f, tp.v, AlgebraOp::sub));
  const QPSeries r2 = lhs(tp.v, pert.g_hat);
  return {norm(r1, s, r1.radius()), norm(r2, s, r2.radius())};
}

BesselCheck bessel_check(const QPSeries& f, double s) {
  const ModeLayout& lay = f.layout();
  const auto l1 = lay.k_l1();
  const int ny = static_cast<int>(lay.n_cheb()) + 1;
  const auto nodes = cheb::nodes(ny);
  BesselCheck out;
  for (int j = 0; j < ny; ++j) {
    double acc = 0.0;
    for (std::size_t q = 0; q < lay.n_modes(); ++q) {
      const double a = std::abs(cheb::eval(f.mode(q), nodes[j]));
      if (a == 0.0) continue;
      acc += a * a * std::exp(2.0 * s * (l1[lay.kidx_of_mode(q)] + std::abs(lay.l_of(q))));
    }
    out.lhs = std::max(out.lhs, acc);
  }
  out.sup = shell_norm(f, s, f.radius());
  out.rhs = std::pow(2.0, lay.m() + 1) * out.sup * out.sup;
  return out;
}

}  // namespace kamlab
