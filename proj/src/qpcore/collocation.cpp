#include "kamlab/collocation.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "kamlab/error.hpp"

namespace kamlab {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
struct PlanCache {
  std::mutex mu;
  std::map<std::tuple<std::vector<int>, int, int>, fftw_plan> plans;

  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::vector<int>& dims, int howmany, int sign) {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(dims, howmany, sign);
    auto it = plans.find(key);
    if (it != plans.end()) return it->second;
    int dist = 1;
    for (int d : dims) dist *= d;
    std::vector<fftw_complex> scratch(static_cast<std::size_t>(dist) * howmany);
    fftw_plan p = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, scratch.data(),
                                     nullptr, 1, dist, scratch.data(), nullptr, 1, dist, sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(key, p);
    return p;
  }
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void run_fft(std::vector<cplx>& buf, const std::vector<int>& dims, int howmany, int sign) {
  fftw_plan p = plan_cache().get(dims, howmany, sign);
  auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(p, ptr, ptr);
}

int wrap(int k, int n) { return ((k % n) + n) % n; }
int unwrap(int j, int n) { return j <= n / 2 ? j : j - n; }

}  // namespace

Collocation::Collocation(const FrequencyData& freq, const Truncation& trunc, double radius, int oversample)
    : freq_(freq), trunc_(trunc), radius_(radius), m_(freq.m()) {
  if (oversample < 1) throw Error(ErrorKind::invalid_argument, "oversample must be >= 1");
  n_theta_ = oversample * (2 * trunc.k_max + 1);
  n_t_ = trunc.l_max == 0 ? 1 : oversample * (2 * trunc.l_max + 1);
  n_y_ = oversample * (trunc.d_y + 1);
  torus_ = static_cast<std::size_t>(n_t_);
  for (int j = 0; j < m_; ++j) torus_ *= static_cast<std::size_t>(n_theta_);
  s_ = cheb::nodes(n_y_);
  dims_.assign(static_cast<std::size_t>(m_), n_theta_);
  dims_.push_back(n_t_);
}

double Collocation::theta(std::size_t tor, int dim) const {
  std::size_t rest = tor / static_cast<std::size_t>(n_t_);
  for (int j = m_ - 1; j > dim; --j) rest /= static_cast<std::size_t>(n_theta_);
  const auto jj = static_cast<int>(rest % static_cast<std::size_t>(n_theta_));
  return 2.0 * std::numbers::pi * jj / n_theta_;
}

double Collocation::t_node(int jt) const { return 2.0 * std::numbers::pi * jt / n_t_; }

std::vector<cplx> Collocation::synthesize(const QPSeries& f) const {
  if (!(f.freq() == freq_)) throw Error(ErrorKind::frequency_mismatch, "series/grid frequency mismatch");
  const ModeLayout& lay = f.layout();
  const int nc = static_cast<int>(lay.n_cheb());
  // Chebyshev synthesis matrix for f's radius evaluated at this grid's y nodes.
  std::vector<double> tmat(static_cast<std::size_t>(n_y_) * nc);
  for (int iy = 0; iy < n_y_; ++iy) {
    const double s = y_node(iy) / f.radius();
    double tm1 = 1.0, tc = s;
    for (int c = 0; c < nc; ++c) {
      double v;
      if (c == 0) {
        v = 1.0;
      } else if (c == 1) {
        v = s;
      } else {
        v = 2.0 * s * tc - tm1;
        tm1 = tc;
        tc = v;
      }
      tmat[static_cast<std::size_t>(iy) * nc + c] = v;
    }
  }
  std::vector<cplx> buf(size(), cplx{0.0});
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const auto slice = f.mode(q);
    bool nz = false;
    for (const auto& v : slice) nz = nz || v != cplx{0.0};
    if (!nz) continue;
    const auto k = lay.k_of(lay.kidx_of_mode(q));
    const int l = lay.l_of(q);
    bool inside = std::abs(l) <= n_t_ / 2 || n_t_ == 1;
    if (n_t_ == 1 && l != 0) inside = false;
    std::size_t bin = 0;
    for (int j = 0; j < m_; ++j) {
      if (2 * std::abs(k[j]) >= n_theta_) inside = false;
      bin = bin * static_cast<std::size_t>(n_theta_) + static_cast<std::size_t>(wrap(k[j], n_theta_));
    }
    if (!inside) throw Error(ErrorKind::invalid_argument, "series box exceeds collocation grid");
    bin = bin * static_cast<std::size_t>(n_t_) + static_cast<std::size_t>(wrap(l, n_t_));
    for (int iy = 0; iy < n_y_; ++iy) {
      cplx acc = 0.0;
      for (int c = 0; c < nc; ++c) acc += slice[c] * tmat[static_cast<std::size_t>(iy) * nc + c];
      buf[static_cast<std::size_t>(iy) * torus_ + bin] = acc;
    }
  }
  run_fft(buf, dims_, n_y_, FFTW_BACKWARD);
  return buf;
}

QPSeries Collocation::analyse(std::span<const cplx> values, Parity parity, double* tail) const {
  if (values.size() != size()) throw Error(ErrorKind::invalid_argument, "grid value count mismatch");
  std::vector<cplx> buf(values.begin(), values.end());
  run_fft(buf, dims_, n_y_, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(torus_);
  for (auto& v : buf) v *= scale;

  // Chebyshev analysis along y for every torus point at once.
  const std::size_t ny = static_cast<std::size_t>(n_y_);
  std::vector<double> amat(ny * ny);
  for (std::size_t c = 0; c < ny; ++c) {
    for (std::size_t j = 0; j < ny; ++j) {
      amat[c * ny + j] = (c == 0 ? 1.0 : 2.0) / n_y_ * std::cos(std::numbers::pi * c * (j + 0.5) / n_y_);
    }
  }
  std::vector<cplx> coef(ny * torus_, cplx{0.0});
  for (std::size_t c = 0; c < ny; ++c) {
    cplx* dst = &coef[c * torus_];
    for (std::size_t j = 0; j < ny; ++j) {
      const double a = amat[c * ny + j];
      const cplx* src = &buf[j * torus_];
      for (std::size_t tor = 0; tor < torus_; ++tor) dst[tor] += a * src[tor];
    }
  }

  QPSeries out(freq_, trunc_, radius_, parity);
  const ModeLayout& lay = out.layout();
  const std::size_t nc = lay.n_cheb();
  double tail_sum = 0.0;
  std::vector<int> k(static_cast<std::size_t>(m_));
  for (std::size_t tor = 0; tor < torus_; ++tor) {
    std::size_t rest = tor;
    const int l = unwrap(static_cast<int>(rest % static_cast<std::size_t>(n_t_)), n_t_);
    rest /= static_cast<std::size_t>(n_t_);
    for (int j = m_ - 1; j >= 0; --j) {
      k[j] = unwrap(static_cast<int>(rest % static_cast<std::size_t>(n_theta_)), n_theta_);
      rest /= static_cast<std::size_t>(n_theta_);
    }
    const std::size_t q = lay.mode_of(k, l);
    if (q >= lay.n_modes()) {
      for (std::size_t c = 0; c < ny; ++c) tail_sum += std::abs(coef[c * torus_ + tor]);
      continue;
    }
    auto slice = out.mode(q);
    for (std::size_t c = 0; c < ny; ++c) {
      if (c < nc) {
        slice[c] = coef[c * torus_ + tor];
      } else {
        tail_sum += std::abs(coef[c * torus_ + tor]);
      }
    }
  }
  if (tail) *tail = tail_sum;
  return out;
}

GridEvaluator::GridEvaluator(const QPSeries& g, const Collocation& grid)
    : g_(&g), m_(g.freq().m()), k_max_(g.trunc().k_max), n_cheb_(static_cast<int>(g.layout().n_cheb())),
      n_k_(g.layout().n_k()), radius_(g.radius()) {
  const ModeLayout& lay = g.layout();
  const int nt = grid.n_t();
  const int L = g.trunc().l_max;
  partial_.assign(static_cast<std::size_t>(nt) * n_k_ * static_cast<std::size_t>(n_cheb_), cplx{0.0});
  for (int jt = 0; jt < nt; ++jt) {
    const double t = grid.t_node(jt);
    std::vector<cplx> phase(static_cast<std::size_t>(2 * L + 1));
    for (int l = -L; l <= L; ++l) phase[static_cast<std::size_t>(l + L)] = std::polar(1.0, l * t);
    for (std::size_t kidx = 0; kidx < n_k_; ++kidx) {
      cplx* dst = &partial_[(static_cast<std::size_t>(jt) * n_k_ + kidx) * n_cheb_];
      for (int l = -L; l <= L; ++l) {
        const auto slice = g.mode(kidx * lay.n_l() + static_cast<std::size_t>(l + L));
        const cplx ph = phase[static_cast<std::size_t>(l + L)];
        for (int c = 0; c < n_cheb_; ++c) dst[c] += slice[c] * ph;
      }
    }
  }
}

cplx GridEvaluator::operator()(int jt, std::span<const cplx> theta, cplx y) const {
  const int K = k_max_;
  const int nk1 = 2 * K + 1;
  // Per-dimension powers e^{i k θ_j}, k = -K..K.
  thread_local std::vector<cplx> pw;
  thread_local std::vector<cplx> tc;
  pw.resize(static_cast<std::size_t>(m_ * nk1));
  tc.resize(static_cast<std::size_t>(n_cheb_));
  for (int j = 0; j < m_; ++j) {
    cplx* row = &pw[static_cast<std::size_t>(j * nk1)];
    const cplx e = std::exp(cplx{0.0, 1.0} * theta[j]);
    const cplx einv = 1.0 / e;
    row[K] = 1.0;
    for (int k = 1; k <= K; ++k) {
      row[K + k] = row[K + k - 1] * e;
      row[K - k] = row[K - k + 1] * einv;
    }
  }
  const cplx s = y / radius_;
  for (int c = 0; c < n_cheb_; ++c) {
    if (c == 0) {
      tc[0] = 1.0;
    } else if (c == 1) {
      tc[1] = s;
    } else {
      tc[c] = 2.0 * s * tc[c - 1] - tc[c - 2];
    }
  }
  const cplx* base = &partial_[static_cast<std::size_t>(jt) * n_k_ * n_cheb_];
  cplx acc = 0.0;
  std::vector<int> digit(static_cast<std::size_t>(m_), 0);
  for (std::size_t kidx = 0; kidx < n_k_; ++kidx) {
    const cplx* p = base + kidx * n_cheb_;
    cplx inner = 0.0;
    for (int c = 0; c < n_cheb_; ++c) inner += p[c] * tc[c];
    if (inner != cplx{0.0}) {
      cplx e = 1.0;
      for (int j = 0; j < m_; ++j) e *= pw[static_cast<std::size_t>(j * nk1 + digit[j])];
      acc += inner * e;
    }
    for (int j = m_ - 1; j >= 0; --j) {
      if (++digit[j] < nk1) break;
      digit[j] = 0;
    }
  }
  return acc;
}

}  // namespace kamlab
