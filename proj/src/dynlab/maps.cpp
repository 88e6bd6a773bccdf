#include <algorithm>
#include <cmath>
#include <numbers>

#include "kamlab/dynlab.hpp"
#include "kamlab/error.hpp"

namespace kamlab {

const char* to_string(MapFamily f) {
  switch (f) {
    case MapFamily::M: return "M";
    case MapFamily::M1: return "M1";
    case MapFamily::M2: return "M2";
    case MapFamily::M_delta: return "M_delta";
  }
  return "?";
}

MapFamily map_family_from_string(const std::string& s) {
  if (s == "M") return MapFamily::M;
  if (s == "M1") return MapFamily::M1;
  if (s == "M2") return MapFamily::M2;
  if (s == "M_delta") return MapFamily::M_delta;
  throw Error(ErrorKind::invalid_argument, "unknown map family '" + s + "'");
}

namespace {

bool present(const QPSeries& f) { return !f.data().empty(); }

void require_x_only(const QPSeries& f, const char* what) {
  const ModeLayout& lay = f.layout();
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    auto c = f.mode(q);
    for (std::size_t j = 0; j < c.size(); ++j) {
      if ((lay.l_of(q) != 0 || j > 0) && c[j] != cplx{0.0}) {
        throw Error(ErrorKind::invalid_argument, std::string(what) + " must depend on x only");
      }
    }
  }
}

void require_parity(const QPSeries& f, Parity p, const char* what) {
  if (parity_residual(f, p) > 1e-12 || reality_residual(f) > 1e-12) {
    throw Error(ErrorKind::parity_violation, std::string(what) + " must be a real " + to_string(p) + " series");
  }
}

bool is_blank(const YPoly& p) {
  return p.degree() == 0 && p.coeffs()[0] == cplx{0.0};
}

double sup_norm(const Point2& a, const Point2& b) { return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y)); }

}  // namespace

void ReversibleMapSpec::validate() const {
  if (!std::isfinite(gamma)) throw Error(ErrorKind::invalid_argument, "gamma must be finite");
  if (!(delta >= 0.0 && delta <= 1.0)) throw Error(ErrorKind::invalid_argument, "delta must lie in [0, 1]");
  if (family == MapFamily::M && delta != 1.0) throw Error(ErrorKind::invalid_argument, "family M has delta = 1");
  if (!(radius > 0.0)) throw Error(ErrorKind::invalid_argument, "radius must be positive");
  if (family == MapFamily::M2 && is_blank(twist)) throw Error(ErrorKind::invalid_argument, "family M2 needs a twist h(y)");
  if (!is_blank(twist) && twist.radius() < radius) {
    throw Error(ErrorKind::invalid_argument, "twist polynomial radius is smaller than the action domain");
  }
  if (present(kick)) {
    require_x_only(kick, "kick");
    require_parity(kick, Parity::odd, "kick");
  }
  if (family == MapFamily::M_delta) {
    if (!present(u0) || !present(v0)) throw Error(ErrorKind::invalid_argument, "family M_delta needs u0 and v0");
    require_x_only(u0, "u0");
    require_x_only(v0, "v0");
    require_parity(u0, Parity::odd, "u0");
    require_parity(v0, Parity::even, "v0");
    if (delta * norm(derivative(u0, Var::x), 0.0, u0.radius()) >= 1.0) {
      throw Error(ErrorKind::invalid_argument, "conjugation x + delta u0(x) is not monotone");
    }
  } else if (present(u0) || present(v0)) {
    throw Error(ErrorKind::invalid_argument, "u0, v0 belong to family M_delta only");
  }
}

ReversibleMap::ReversibleMap(ReversibleMapSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (present(spec_.kick)) b_ = SparseSeries(spec_.kick);
  if (spec_.family == MapFamily::M_delta) {
    conjugated_ = true;
    u0_ = SparseSeries(spec_.u0);
    v0_ = SparseSeries(spec_.v0);
    u0x_ = SparseSeries(derivative(spec_.u0, Var::x));
  }
}

double ReversibleMap::h(double y) const {
  const bool identity = spec_.family == MapFamily::M || spec_.family == MapFamily::M1 || is_blank(spec_.twist);
  return identity ? y : spec_.twist(y).real();
}

Point2 ReversibleMap::core(Point2 z) const {
  const double d = spec_.delta;
  z.x += 0.5 * (spec_.gamma + d * h(z.y));
  z.y += d * b_(z.x, 0.0);
  z.x += 0.5 * (spec_.gamma + d * h(z.y));
  return z;
}

Point2 ReversibleMap::conj(Point2 z) const {
  const double d = spec_.delta;
  return {z.x + d * u0_(z.x, 0.0), z.y + d * v0_(z.x, 0.0)};
}

Point2 ReversibleMap::conj_inverse(Point2 z) const {
  const double d = spec_.delta;
  double x = z.x - d * u0_(z.x, 0.0);
  for (int it = 0; it < 60; ++it) {
    const double res = x + d * u0_(x, 0.0) - z.x;
    x -= res / (1.0 + d * u0x_(x, 0.0));
    if (std::abs(res) <= 1e-16 * std::max(1.0, std::abs(z.x))) break;
  }
  return {x, z.y - d * v0_(x, 0.0)};
}

Point2 ReversibleMap::operator()(Point2 z) const {
  auto check = [&](const Point2& p) {
    if (!(std::abs(p.y) <= spec_.radius)) {
      throw Error(ErrorKind::orbit_escape, "|y| = " + std::to_string(std::abs(p.y)) + " exceeds " +
                                               std::to_string(spec_.radius));
    }
  };
  check(z);
  Point2 w = conjugated_ ? conj_inverse(core(conj(z))) : core(z);
  check(w);
  return w;
}

Point2 ReversibleMap::inverse(Point2 z) const {
  Point2 w{z.x - spec_.gamma - spec_.delta * h(std::clamp(z.y, -spec_.radius, spec_.radius)), z.y};
  const double scale = std::max(1.0, std::max(std::abs(z.x), std::abs(z.y)));
  for (int it = 0; it < 60; ++it) {
    const Point2 m = (*this)(w);
    const double rx = m.x - z.x, ry = m.y - z.y;
    if (std::max(std::abs(rx), std::abs(ry)) <= 4e-16 * scale && it > 0) break;
    const double hx = 1e-6 * std::max(1.0, std::abs(w.x)), hy = 1e-6;
    const Point2 px = (*this)({w.x + hx, w.y}), mx = (*this)({w.x - hx, w.y});
    const Point2 py = (*this)({w.x, w.y + hy}), my = (*this)({w.x, w.y - hy});
    const double a = (px.x - mx.x) / (2 * hx), b = (py.x - my.x) / (2 * hy);
    const double c = (px.y - mx.y) / (2 * hx), d = (py.y - my.y) / (2 * hy);
    const double det = a * d - b * c;
    if (std::abs(det) < 1e-300) throw Error(ErrorKind::contraction_failure, "singular Jacobian in map inversion");
    const double dx = (d * rx - b * ry) / det, dy = (a * ry - c * rx) / det;
    w.x -= dx;
    w.y -= dy;
    if (std::max(std::abs(dx), std::abs(dy)) <= 1e-16 * scale) break;
  }
  return w;
}

double ReversibleMap::reversibility_residual(int n) const {
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Point2 z{2.0 * std::numbers::pi * i / n, 0.5 * spec_.radius * (n > 1 ? 2.0 * j / (n - 1) - 1.0 : 0.0)};
      worst = std::max(worst, sup_norm((*this)(involution((*this)(z))), involution(z)));
    }
  }
  return worst;
}

namespace {

double bump(double s) { return (s <= 0.0 || s >= 1.0) ? 0.0 : std::exp(-1.0 / (s * (1.0 - s))); }

double weighted_mean(const std::vector<Point2>& s, std::size_t from, std::size_t to) {
  const double n = static_cast<double>(to - from);
  double num = 0.0, den = 0.0;
  for (std::size_t j = from; j < to; ++j) {
    const double w = bump((static_cast<double>(j - from) + 0.5) / n);
    num += w * (s[j + 1].x - s[j].x);
    den += w;
  }
  return num / den;
}

void finish(OrbitRecord& rec) {
  rec.action_min = HUGE_VAL;
  rec.action_max = -HUGE_VAL;
  for (const Point2& p : rec.samples) {
    rec.action_min = std::min(rec.action_min, p.y);
    rec.action_max = std::max(rec.action_max, p.y);
  }
  if (rec.samples.size() >= 1000) {
    rec.rotation = rotation_number(rec);
    rec.has_rotation = true;
  }
}

}  // namespace

RotationEstimate rotation_number(const OrbitRecord& orbit) {
  const std::size_t n = orbit.samples.size();
  if (n < 1000) {
    throw Error(ErrorKind::insufficient_data, "rotation number needs >= 1000 points, got " + std::to_string(n));
  }
  const std::size_t inc = n - 1;
  RotationEstimate r;
  r.value = weighted_mean(orbit.samples, 0, inc);
  r.error = std::abs(r.value - weighted_mean(orbit.samples, inc - inc / 4, inc));
  return r;
}

CurveDetection detect_invariant_curve(const OrbitRecord& orbit, double perturbation) {
  CurveDetection d;
  d.rotation = rotation_number(orbit);
  d.oscillation = orbit.action_max - orbit.action_min;
  d.detected = !orbit.escaped && d.rotation.error < 1e-8 && d.oscillation < 10.0 * perturbation;
  return d;
}

template <class Step, class Residual>
OrbitRecord iterate_generic(Step&& step, Residual&& residual, Point2 z0, int n, bool allow_escape) {
  if (n < 0) throw Error(ErrorKind::invalid_argument, "iteration count must be >= 0");
  OrbitRecord rec;
  rec.samples.reserve(static_cast<std::size_t>(n) + 1);
  rec.samples.push_back(z0);
  Point2 z = z0;
  for (int i = 0; i < n; ++i) {
    try {
      z = step(z);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::orbit_escape || !allow_escape) throw;
      rec.escaped = true;
      break;
    }
    rec.samples.push_back(z);
    ++rec.iterations;
  }
  if (!rec.escaped) {
    try {
      rec.reversibility_residual = residual(z);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::orbit_escape || !allow_escape) throw;
      rec.reversibility_residual = std::nan("");
    }
  } else {
    rec.reversibility_residual = std::nan("");
  }
  finish(rec);
  return rec;
}

OrbitRecord iterate_map(const ReversibleMap& map, Point2 z0, int n, bool allow_escape) {
  return iterate_generic(
      map,
      [&](Point2 z) {
        return sup_norm(ReversibleMap::involution(map(ReversibleMap::involution(z))), map.inverse(z));
      },
      z0, n, allow_escape);
}

OrbitRecord iterate_section(const FlowSectionMap& map, Point2 z0, int n, bool allow_escape) {
  auto G = [](Point2 z) { return Point2{-z.x, z.y}; };
  return iterate_generic(map, [&](Point2 z) { return sup_norm(map(G(map(z))), G(z)); }, z0, n, allow_escape);
}

std::pair<QPSeries, QPSeries> small_twist_terms(const ReversibleMapSpec& spec, const Truncation& trunc) {
  spec.validate();
  if (spec.family != MapFamily::M_delta) {
    throw Error(ErrorKind::invalid_argument, "first-order terms are defined for family M_delta");
  }
  const FrequencyData& freq = spec.u0.freq();
  QPSeries l1 = QPSeries::zero(freq, trunc, spec.radius, Parity::none);
  QPSeries l2 = QPSeries::zero(freq, trunc, spec.radius, Parity::none);
  const std::vector<int> k0(static_cast<std::size_t>(freq.m()), 0);
  l1.set_coefficient(k0, 0, is_blank(spec.twist) ? YPoly::identity(std::max(1, trunc.d_y), spec.radius)
                                                  : spec.twist.restricted(spec.radius));
  if (present(spec.kick)) require_same_frequency(spec.kick, spec.u0);
  const QPSeries u = with_truncation(spec.u0, trunc), v = with_truncation(spec.v0, trunc);
  const QPSeries b = present(spec.kick) ? with_truncation(spec.kick, trunc) : QPSeries::zeros_like(u, Parity::odd);
  const ModeLayout& lay = l1.layout();
  const auto kd = lay.k_dot(freq);
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    if (lay.l_of(q) != 0) continue;
    const double w = kd[lay.kidx_of_mode(q)];
    bool zero = true;
    for (int v : lay.k_of(lay.kidx_of_mode(q))) zero = zero && v == 0;
    const cplx shift = std::polar(1.0, w * spec.gamma);
    const cplx half = std::polar(1.0, 0.5 * w * spec.gamma);
    if (!zero) l1.mode(q)[0] = u.mode(q)[0] * (1.0 - shift);
    l2.mode(q)[0] = v.mode(q)[0] * (1.0 - shift) + b.mode(q)[0] * half;
  }
  return {std::move(l1), std::move(l2)};
}

}  // namespace kamlab
