#include <cmath>

#include "kamlab/dynlab.hpp"
#include "kamlab/error.hpp"

namespace kamlab {

SparseSeries::SparseSeries(const QPSeries& f) : radius_(f.radius()) {
  if (reality_residual(f) > 1e-12) throw Error(ErrorKind::invalid_argument, "series is not real");
  const ModeLayout& lay = f.layout();
  const auto kd = lay.k_dot(f.freq());
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    const std::size_t qn = lay.neg(q);
    if (qn < q) continue;
    auto c = f.mode(q);
    std::size_t deg = c.size();
    while (deg > 0 && c[deg - 1] == cplx{0.0}) --deg;
    if (deg == 0) continue;
    terms_.push_back({kd[lay.kidx_of_mode(q)], lay.l_of(q), qn == q ? 1.0 : 2.0,
                      std::vector<cplx>(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(deg))});
  }
}

double SparseSeries::operator()(double x, double y, double t) const {
  const double s = y / radius_;
  double acc = 0.0;
  for (const Term& tm : terms_) {
    const cplx a = tm.cheb.size() == 1 ? tm.cheb[0] : cheb::eval(tm.cheb, cplx{s});
    const double ph = tm.kdot * x + tm.l * t;
    acc += tm.weight * (a.real() * std::cos(ph) - a.imag() * std::sin(ph));
  }
  return acc;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::fit_degenerate, "need two or more points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw Error(ErrorKind::fit_degenerate, "log-log fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-14) throw Error(ErrorKind::fit_degenerate, "abscissae coincide");
  return (n * sxy - sx * sy) / den;
}

}  // namespace kamlab
