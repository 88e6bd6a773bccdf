#include "kamlab/dioph.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kamlab/error.hpp"

namespace kamlab {

namespace {

constexpr double resonance_floor = 1e-14;

// Odometer over the box [-n, n]^m.
bool next_index(std::vector<int>& k, int n) {
  for (int j = static_cast<int>(k.size()) - 1; j >= 0; --j) {
    if (++k[j] <= n) return true;
    k[j] = -n;
  }
  return false;
}

int max_abs(const std::vector<int>& k) {
  int v = 0;
  for (int x : k) v = std::max(v, std::abs(x));
  return v;
}

// First nonzero entry positive; k and -k give the same divisor magnitude.
bool canonical(const std::vector<int>& k) {
  for (int x : k) {
    if (x != 0) return x > 0;
  }
  return false;
}

std::string index_string(const std::vector<int>& k, int l) {
  std::ostringstream os;
  os << "k=(";
  for (std::size_t j = 0; j < k.size(); ++j) os << (j ? "," : "") << k[j];
  os << "), l=" << l;
  return os.str();
}

}  // namespace

double DiophCertificate::lower_bound(int k_abs) const { return c0 / std::pow(static_cast<double>(k_abs), sigma); }

DiophCertificate certify(const FrequencyData& freq, double sigma, int k_max) {
  freq.validate();
  if (k_max < 1) throw Error(ErrorKind::invalid_argument, "K_max must be >= 1");
  const int m = freq.m();
  DiophCertificate cert;
  cert.sigma = sigma;
  cert.k_checked = k_max;
  std::vector<double> shell_min(static_cast<std::size_t>(k_max + 1), std::numeric_limits<double>::infinity());
  std::vector<double> shell_c0(static_cast<std::size_t>(k_max + 1), std::numeric_limits<double>::infinity());
  std::vector<std::vector<int>> shell_worst(static_cast<std::size_t>(k_max + 1));
  std::vector<int> shell_worst_l(static_cast<std::size_t>(k_max + 1), 0);
  int resonant_shell = k_max + 1;
  std::vector<int> resonant_k;
  int resonant_l = 0;

  std::vector<int> k(static_cast<std::size_t>(m), -k_max);
  do {
    if (!canonical(k)) continue;
    const double a = freq.dot(k) * freq.gamma;
    const double l = -std::nearbyint(a);
    const double d = std::abs(a + l);
    const int ka = max_abs(k);
    if (d < resonance_floor) {
      if (ka < resonant_shell || (ka == resonant_shell && k < resonant_k)) {
        resonant_shell = ka;
        resonant_k = k;
        resonant_l = static_cast<int>(l);
      }
      continue;
    }
    const double c = d * std::pow(static_cast<double>(ka), sigma);
    const auto s = static_cast<std::size_t>(ka);
    shell_min[s] = std::min(shell_min[s], d);
    if (c < shell_c0[s] || (c == shell_c0[s] && k < shell_worst[s])) {
      shell_c0[s] = c;
      shell_worst[s] = k;
      shell_worst_l[s] = static_cast<int>(l);
    }
  } while (next_index(k, k_max));

  if (resonant_shell <= k_max) {
    throw Error(ErrorKind::resonance_detected, "divisor below 1e-14 at " + index_string(resonant_k, resonant_l));
  }

  cert.c0 = std::numeric_limits<double>::infinity();
  for (int ka = 1; ka <= k_max; ++ka) {
    const auto s = static_cast<std::size_t>(ka);
    if (shell_c0[s] < cert.c0) {
      cert.c0 = shell_c0[s];
      cert.worst = FourierIndex{shell_worst[s], shell_worst_l[s]};
      cert.worst_divisor = shell_c0[s] / std::pow(static_cast<double>(ka), sigma);
    }
    cert.shells.push_back({ka, shell_min[s], cert.c0});
  }
  return cert;
}

double divisor_sum(const FrequencyData& freq, int nu) {
  freq.validate();
  if (nu < 1) return 0.0;
  const int m = freq.m();
  double acc = 0.0;
  std::vector<int> k(static_cast<std::size_t>(m), -nu);
  do {
    int k1 = 0;
    for (int x : k) k1 += std::abs(x);
    if (k1 == 0 || k1 > nu) continue;
    const double a = freq.dot(k) * freq.gamma;
    const int budget = nu - k1;
    for (int l = -budget; l <= budget; ++l) {
      const double d = a + l;
      acc += 1.0 / (d * d);
    }
  } while (next_index(k, nu));
  return acc;
}

double divisor_sum_bound(int m, double c0, double sigma, int nu) {
  return std::numbers::pi * std::numbers::pi / 8.0 * std::pow(3.0, m + 3) / (c0 * c0) *
         std::pow(static_cast<double>(nu), 2.0 * sigma);
}

}  // namespace kamlab
