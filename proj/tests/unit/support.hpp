#pragma once

#include <random>
#include <vector>

#include "kamlab/qpcore.hpp"

namespace kamlab::testing {

inline FrequencyData unit_freq(double gamma) { return FrequencyData{{1.0}, gamma}; }

/// Real series with `n_terms` random cos (even) or sin (odd) terms; each term
/// gets a random polynomial y-profile of degree <= d_y.
inline QPSeries random_series(const FrequencyData& freq, const Truncation& tr, double radius, int n_terms,
                              Parity parity, std::mt19937_64& rng, double amp = 1.0) {
  QPSeries f = QPSeries::zero(freq, tr, radius, parity);
  std::uniform_int_distribution<int> kd(-tr.k_max, tr.k_max), ld(-tr.l_max, tr.l_max), dd(0, tr.d_y);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int n = 0; n < n_terms; ++n) {
    std::vector<int> k(static_cast<std::size_t>(freq.m()));
    for (auto& v : k) v = kd(rng);
    const int l = ld(rng);
    std::vector<double> py(static_cast<std::size_t>(dd(rng) + 1));
    for (auto& v : py) v = u(rng);
    const bool use_cos = parity == Parity::even || (parity == Parity::none && coin(rng) == 0);
    if (use_cos) {
      f.add_cos(k, l, amp * u(rng), py);
    } else {
      bool zero = l == 0;
      for (int v : k) zero = zero && v == 0;
      if (zero) continue;
      f.add_sin(k, l, amp * u(rng), py);
    }
  }
  return f;
}

}  // namespace kamlab::testing
