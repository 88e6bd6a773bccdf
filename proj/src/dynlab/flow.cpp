#include <cmath>
#include <numbers>

#include "integrator.hpp"
#include "kamlab/dynlab.hpp"
#include "kamlab/error.hpp"

namespace kamlab {

FlowSectionMap::FlowSectionMap(const QPSeries& f, const QPSeries& g, double gamma, double tolerance)
    : gamma_(gamma), tol_(tolerance), radius_(f.radius()) {
  require_same_frequency(f, g);
  if (parity_residual(f, Parity::even) > 1e-12) {
    throw Error(ErrorKind::parity_violation, "f must satisfy f(-x,y,-t) = f(x,y,t)");
  }
  if (parity_residual(g, Parity::odd) > 1e-12) {
    throw Error(ErrorKind::parity_violation, "g must satisfy g(-x,y,-t) = -g(x,y,t)");
  }
  if (!(tolerance > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
  f_ = SparseSeries(f);
  g_ = SparseSeries(g);
}

Point2 FlowSectionMap::advance(Point2 z, double t0, double t1) const {
  if (!(std::abs(z.y) <= radius_)) throw Error(ErrorKind::orbit_escape, "start point outside |y| <= r");
  const double x0 = z.x;
  auto rhs = [this, x0](const detail::State2& s, detail::State2& ds, double t) {
    ds[0] = gamma_ + s[1] + f_(x0 + s[0], s[1], t);
    ds[1] = g_(x0 + s[0], s[1], t);
  };
  detail::Integrator integ(tol_);
  detail::State2 s{0.0, z.y};
  integ.advance(rhs, s, t0, t1);
  if (!(std::abs(s[1]) <= radius_)) {
    throw Error(ErrorKind::orbit_escape, "|y| = " + std::to_string(std::abs(s[1])) + " left the series domain");
  }
  return {x0 + s[0], s[1]};
}

Point2 FlowSectionMap::operator()(Point2 z) const { return advance(z, 0.0, 2.0 * std::numbers::pi); }

}  // namespace kamlab
