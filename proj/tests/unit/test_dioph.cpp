#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "kamlab/dioph.hpp"
#include "kamlab/error.hpp"

using namespace kamlab;

namespace {

nlohmann::json golden() {
  std::ifstream in(std::string(KAMLAB_TEST_DATA) + "/dioph_golden.json");
  return nlohmann::json::parse(in);
}

const FrequencyData sqrt2_freq{{1.0}, std::numbers::sqrt2};

}  // namespace

TEST(Dioph, GoldenRatioOfSqrt2Scan) {
  const auto g = golden();
  const auto cert = certify(sqrt2_freq, 1.0, 10000);
  EXPECT_NEAR(cert.c0, g["sqrt2_sigma1_K10000"]["c0"].get<double>(), 1e-12);
  EXPECT_EQ(cert.worst.k, g["sqrt2_sigma1_K10000"]["k"].get<std::vector<int>>());
  EXPECT_EQ(cert.worst.l, -3);
  // The liminf sits at 1/(2√2); the finite scan is pulled below it by k = 2.
  EXPECT_LT(cert.c0, 1.0 / (2.0 * std::numbers::sqrt2));
  EXPECT_EQ(cert.k_checked, 10000);
  EXPECT_GE(cert.worst_divisor * std::pow(2.0, cert.sigma), cert.c0 * (1 - 1e-15));
}

TEST(Dioph, Sigma101) {
  const auto g = golden();
  const auto cert = certify(sqrt2_freq, 1.01, 10000);
  EXPECT_NEAR(cert.c0, g["sqrt2_sigma1.01_K10000"]["c0"].get<double>(), 1e-12);
}

TEST(Dioph, RationalResonance) {
  try {
    certify(FrequencyData{{1.0}, 0.5}, 1.0, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::resonance_detected);
    EXPECT_NE(std::string(e.what()).find("k=(2), l=-1"), std::string::npos);
  }
}

TEST(Dioph, TwoFrequencyExhaustiveScan) {
  const auto g = golden()["omega_1_sqrt2_gamma_sqrt3m1_sigma2.01_K200"];
  const auto cert = certify(FrequencyData{{1.0, std::numbers::sqrt2}, std::sqrt(3.0) - 1.0}, 2.01, 200);
  EXPECT_NEAR(cert.c0 / g["c0"].get<double>(), 1.0, 1e-11);
  EXPECT_EQ(cert.worst.k, g["k"].get<std::vector<int>>());
  EXPECT_NEAR(cert.worst_divisor / g["divisor"].get<double>(), 1.0, 1e-10);
}

TEST(Dioph, CertificateInvariant) {
  const FrequencyData fr{{1.0, std::numbers::sqrt2}, std::sqrt(3.0) - 1.0};
  const auto cert = certify(fr, 2.01, 30);
  for (int k1 = -30; k1 <= 30; ++k1) {
    for (int k2 = -30; k2 <= 30; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const std::vector<int> k{k1, k2};
      const double a = fr.dot(k) * fr.gamma;
      const double d = std::abs(a - std::nearbyint(a));
      EXPECT_GE(d, cert.lower_bound(std::max(std::abs(k1), std::abs(k2))) * (1 - 1e-14));
    }
  }
  ASSERT_EQ(cert.shells.size(), 30u);
  for (std::size_t i = 1; i < cert.shells.size(); ++i) EXPECT_LE(cert.shells[i].c0_running, cert.shells[i - 1].c0_running);
}

TEST(Dioph, IntegerShiftOfGamma) {
  const auto a = certify(sqrt2_freq, 1.0, 2000);
  const auto b = certify(FrequencyData{{1.0}, std::numbers::sqrt2 + 3.0}, 1.0, 2000);
  // γ + 3 is rounded once in double, so divisors agree to that rounding times |k|.
  EXPECT_NEAR(a.c0, b.c0, 1e-12);
  EXPECT_EQ(a.worst.k, b.worst.k);
}

TEST(Dioph, DivisorSumShells) {
  const auto g = golden()["divisor_sum_sqrt2"];
  EXPECT_NEAR(divisor_sum(sqrt2_freq, 1), 1.0, 1e-15);
  for (const char* nu : {"5", "10", "50"}) {
    const double want = g[nu].get<double>();
    EXPECT_NEAR(divisor_sum(sqrt2_freq, std::stoi(nu)) / want, 1.0, 1e-13) << nu;
  }
}

TEST(Dioph, DivisorSumMonotoneAndBounded) {
  const auto cert = certify(sqrt2_freq, 1.01, 10000);
  double prev = 0.0;
  for (int nu = 1; nu <= 50; ++nu) {
    const double s = divisor_sum(sqrt2_freq, nu);
    EXPECT_GE(s, prev);
    EXPECT_LE(s, divisor_sum_bound(1, cert.c0, cert.sigma, nu));
    prev = s;
  }
  EXPECT_LE(divisor_sum(sqrt2_freq, 5), std::numbers::pi * std::numbers::pi / 8 * 81 / (cert.c0 * cert.c0) * 25 * std::pow(5.0, 0.02));
}
