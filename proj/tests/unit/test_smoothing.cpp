#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kamlab/error.hpp"
#include "kamlab/smoothing.hpp"
#include "support.hpp"

using namespace kamlab;
using kamlab::testing::random_series;

namespace {

const FrequencyData unit{{1.0}, std::numbers::sqrt2};

// S_δ f(x0) = ∫ K(w) f(x0 - δw) dw with K(w) = (1/2π) ∫ χ(|ξ|) e^{iξw} dξ,
// both integrals by the trapezoid rule. The w-integrand is band-limited to
// |ξ| <= 2, so a step of 1/2 is exact up to the truncation at |w| = 800.
double convolution_oracle(double k, double delta, double x0, const KernelProfile& chi) {
  const int n_xi = 2000;
  auto kern = [&](double w) {
    double acc = 0.5;
    for (int j = 1; j < n_xi; ++j) {
      const double xi = static_cast<double>(j) / n_xi;
      acc += chi(xi) * std::cos(xi * w);
    }
    return acc / n_xi / std::numbers::pi;
  };
  const double h = 0.5;
  double acc = kern(0.0) * std::cos(k * x0);
  for (int j = 1; j <= 1600; ++j) {
    const double w = j * h;
    acc += kern(w) * (std::cos(k * (x0 - delta * w)) + std::cos(k * (x0 + delta * w)));
  }
  return acc * h;
}

QPSeries single(int k, int l, Parity p = Parity::even) {
  QPSeries f = QPSeries::zero(unit, {8, 8, 2}, 0.2, p);
  const std::vector<int> kk{k};
  if (p == Parity::odd) {
    f.add_sin(kk, l, 1.0);
  } else {
    f.add_cos(kk, l, 1.0);
  }
  return f;
}

}  // namespace

TEST(KernelProfile, Shape) {
  const KernelProfile chi;
  EXPECT_EQ(chi(0.0), 1.0);
  EXPECT_EQ(chi(0.5), 1.0);
  EXPECT_EQ(chi(1.0), 0.0);
  EXPECT_EQ(chi(3.0), 0.0);
  double prev = 1.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = chi(0.5 + 0.5 * i / 1000.0);
    EXPECT_LE(v, prev);
    prev = v;
  }
  // Flat at both plateau edges.
  EXPECT_LT(1.0 - chi(0.51), 1e-20);
  EXPECT_LT(chi(0.99), 1e-20);
  EXPECT_NEAR(chi(0.75), 0.5, 1e-15);
}

TEST(Smooth, PlateauAndSupport) {
  const QPSeries f = single(2, 0);
  const QPSeries in = smooth(f, 0.2);  // 0.4 <= a/2
  for (std::size_t i = 0; i < f.data().size(); ++i) EXPECT_EQ(in.data()[i], f.data()[i]);
  const QPSeries out = smooth(f, 0.5);  // 1.0 >= a
  EXPECT_TRUE(out.is_zero());
}

TEST(Smooth, IntermediateModeMatchesConvolution) {
  const KernelProfile chi;
  const double delta = 0.25;
  for (int k : {3, 2}) {
    const QPSeries f = single(k, 0);
    const QPSeries g = smooth(f, delta);
    for (double x0 : {0.0, 0.7, 2.1}) {
      const double want = convolution_oracle(k, delta, x0, chi);
      EXPECT_NEAR(eval(g, x0, 0.0, 0.0).real(), want, 1e-8) << k << " " << x0;
    }
  }
}

TEST(Smooth, KernelQuadratureMatchesOracle) {
  const KernelProfile chi;
  // ∫ K = χ(0) = 1, so K(0) dominates; compare a few values with a finer rule.
  for (double w : {0.0, 3.0, 40.0}) EXPECT_NEAR(chi.kernel(w), chi.kernel(w, 16000), 1e-14);
}

TEST(Smooth, ParityLinearityCommutation) {
  std::mt19937_64 rng(21);
  const FrequencyData fr{{1.0, std::numbers::sqrt2}, 0.3};
  const QPSeries e = random_series(fr, {6, 6, 3}, 0.2, 20, Parity::even, rng);
  const QPSeries o = random_series(fr, {6, 6, 3}, 0.2, 20, Parity::odd, rng);
  const double delta = 0.15;
  const QPSeries se = smooth(e, delta), so = smooth(o, delta);
  EXPECT_EQ(se.parity(), Parity::even);
  EXPECT_EQ(parity_residual(se, Parity::even), 0.0);
  EXPECT_EQ(parity_residual(so, Parity::odd), 0.0);
  const QPSeries lhs = smooth(algebra(e, scaled(o, 2.5), AlgebraOp::add), delta);
  const QPSeries rhs = algebra(se, scaled(so, 2.5), AlgebraOp::add);
  for (std::size_t i = 0; i < lhs.data().size(); ++i) EXPECT_NEAR(std::abs(lhs.data()[i] - rhs.data()[i]), 0.0, 1e-15);
  for (Var v : {Var::x, Var::t}) {
    const QPSeries a = smooth(derivative(e, v), delta), b = derivative(se, v);
    // Same products in a different order: equal up to one rounding.
    for (std::size_t i = 0; i < a.data().size(); ++i) {
      EXPECT_LE(std::abs(a.data()[i] - b.data()[i]), 4e-16 * std::abs(b.data()[i]));
    }
  }
}

TEST(Schedule, Formulas) {
  const auto s = SmoothingSchedule::make(1e-4, 0.01, 1, 1.01, 5);
  EXPECT_DOUBLE_EQ(s.p, 3.01);
  const double mt = 0.01 / (100.0 * (2 * 1.01 + 1 + 0.01));
  EXPECT_DOUBLE_EQ(s.mu_tilde, mt);
  EXPECT_NEAR(s.eps_n[1], std::pow(1e-4, 1 + mt), 1e-18);
  EXPECT_NEAR(s.s_n[1], std::pow(s.eps_n[1], 1 / 3.01), 1e-15);
  for (std::size_t n = 1; n < s.eps_n.size(); ++n) {
    EXPECT_LT(s.eps_n[n], s.eps_n[n - 1]);
    EXPECT_LT(s.s_n[n], s.s_n[n - 1]);
    EXPECT_LT(s.r_n[n], s.r_n[n - 1]);
    EXPECT_NEAR(std::log(s.eps_n[n]) / std::log(s.eps_n[n - 1]), 1 + mt, 1e-13);
  }
}

TEST(Schedule, Degenerate) {
  try {
    SmoothingSchedule::make(0.5, 0.01, 1, 1.01, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_schedule);
  }
}

TEST(Dyadic, BandLimitedInsidePlateau) {
  const auto sched = SmoothingSchedule::make(1e-3, 0.01, 1, 1.01, 6);
  const QPSeries f = single(1, 1);
  const auto parts = dyadic_decompose(f, sched, 6);
  ASSERT_EQ(parts.size(), 7u);
  for (std::size_t i = 0; i < f.data().size(); ++i) EXPECT_EQ(parts[0].data()[i], f.data()[i]);
  for (std::size_t n = 1; n < parts.size(); ++n) EXPECT_TRUE(parts[n].is_zero());
}

TEST(Dyadic, TelescopingParityAndPartialSums) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  // Large μ spreads the radii so that several pieces are nonzero.
  auto sched = SmoothingSchedule::make(0.05, 0.01, 1, 1.01, 6);
  for (std::size_t n = 0; n < sched.s_n.size(); ++n) sched.s_n[n] = 0.4 * std::pow(0.6, static_cast<double>(n));
  const QPSeries f = random_series(unit, {16, 16, 3}, 0.2, 40, Parity::odd, rng);
  const auto parts = dyadic_decompose(f, sched, 6);
  QPSeries sum = parts[0];
  for (std::size_t n = 1; n < parts.size(); ++n) {
    EXPECT_EQ(parts[n].parity(), Parity::odd);
    EXPECT_LE(parity_residual(parts[n], Parity::odd), 1e-15);
    sum = algebra(sum, parts[n], AlgebraOp::add);
  }
  const QPSeries direct = smooth(f, sched.s_n[6]);
  for (std::size_t i = 0; i < sum.data().size(); ++i) EXPECT_NEAR(std::abs(sum.data()[i] - direct.data()[i]), 0.0, 1e-14);
  const double tail = norm(algebra(f, direct, AlgebraOp::sub), 0.0, 0.2);
  for (int i = 0; i < 1000; ++i) {
    const double x = 10 * u(rng), y = 0.2 * u(rng), t = 10 * u(rng);
    EXPECT_LE(std::abs(eval(sum, x, y, t) - eval(f, x, y, t)), tail + 1e-13);
  }
}

TEST(DecayProbe, BandLimitedReproduction) {
  const LacunaryProbe probe{2.0, 5};
  const KernelProfile chi;
  EXPECT_EQ(probe.sup_error(0.5 / 32.0, chi), 0.0);
}

TEST(DecayProbe, Slopes) {
  std::vector<double> deltas;
  for (int i = 4; i <= 11; ++i) deltas.push_back(std::exp2(-i));
  for (double p : {1.0, 2.5, 4.0}) {
    const auto res = error_decay_probe(p, deltas);
    EXPECT_NEAR(res.slope, p, 0.3) << p;
  }
}

TEST(DecayProbe, HalvingDeltaHalvesErrorForLipschitzProbe) {
  const LacunaryProbe probe{1.0, 40};
  const KernelProfile chi;
  const double ratio = probe.sup_error(1.0 / 64, chi) / probe.sup_error(1.0 / 128, chi);
  EXPECT_GE(ratio, 1.6);
  EXPECT_LE(ratio, 2.4);
}

TEST(DecayProbe, TooFewDeltas) {
  try {
    error_decay_probe(1.0, {0.1, 0.05, 0.025});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::fit_degenerate);
  }
}
