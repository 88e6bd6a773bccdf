#pragma once

// Oversampled collocation grids on the shell torus × Chebyshev nodes in y,
// and fast pointwise evaluation of a series at displaced grid points.

#include <complex>
#include <span>
#include <vector>

#include "kamlab/qpcore.hpp"

namespace kamlab {

class Collocation {
 public:
  Collocation(const FrequencyData& freq, const Truncation& trunc, double radius, int oversample = 2);

  int m() const { return m_; }
  int n_theta() const { return n_theta_; }
  int n_t() const { return n_t_; }
  int n_y() const { return n_y_; }
  std::size_t torus_size() const { return torus_; }
  std::size_t size() const { return torus_ * static_cast<std::size_t>(n_y_); }
  double radius() const { return radius_; }
  const FrequencyData& freq() const { return freq_; }
  const Truncation& trunc() const { return trunc_; }

  /// Point p = iy * torus_size() + tor, tor = ((j_1 n_θ + j_2) ... ) n_t + j_t.
  double theta(std::size_t tor, int dim) const;
  int t_index(std::size_t tor) const { return static_cast<int>(tor % static_cast<std::size_t>(n_t_)); }
  double t_node(int jt) const;
  double y_node(int iy) const { return radius_ * s_[static_cast<std::size_t>(iy)]; }

  std::vector<cplx> synthesize(const QPSeries& f) const;
  /// Grid values -> series on this grid's truncation/radius. `tail` receives the
  /// majorant of everything outside the retained box (Fourier and Chebyshev).
  QPSeries analyse(std::span<const cplx> values, Parity parity, double* tail = nullptr) const;

 private:
  FrequencyData freq_;
  Truncation trunc_;
  double radius_;
  int m_, n_theta_, n_t_, n_y_;
  std::size_t torus_;
  std::vector<double> s_;
  std::vector<int> dims_;
};

/// Evaluates g at (θ', y', t_j) where t_j is a node of `grid`, for arbitrary
/// complex θ' and y'. Cost per point is (2K+1)^m (D+1) for g's box.
class GridEvaluator {
 public:
  GridEvaluator(const QPSeries& g, const Collocation& grid);

  cplx operator()(int jt, std::span<const cplx> theta, cplx y) const;

 private:
  const QPSeries* g_;
  int m_, k_max_, n_cheb_;
  std::size_t n_k_;
  double radius_;
  // partial[jt][kidx][c] = Σ_l g(k,l,c) e^{i l t_j}
  std::vector<cplx> partial_;
};

}  // namespace kamlab
