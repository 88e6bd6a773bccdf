#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "integrator.hpp"
#include "kamlab/dynlab.hpp"
#include "kamlab/error.hpp"

namespace kamlab {

namespace {

constexpr double pi = std::numbers::pi;

template <class F>
double integrate(F&& f, double a, double b) {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 6, 1e-13);
}

/// Pieces graded geometrically towards the flagged ends, where saturating
/// terms switch over a width of order 1/amplitude.
template <class F>
double integrate_graded(F&& f, double a, double b, bool at_a, bool at_b) {
  if (b <= a) return 0.0;
  if (!at_a && !at_b) return integrate(f, a, b);
  const double D = (b - a) / (at_a && at_b ? 4.0 : 2.0);
  double acc = integrate(f, at_a ? a + D : a, at_b ? b - D : b);
  double d = D;
  for (int j = 0; j < 40 && d > 1e-12 * D; ++j, d *= 0.5) {
    if (at_a) acc += integrate(f, a + 0.5 * d, a + d);
    if (at_b) acc += integrate(f, b - d, b - 0.5 * d);
  }
  if (at_a) acc += integrate(f, a, a + d);
  if (at_b) acc += integrate(f, b - d, b);
  return acc;
}

bool on_quarter(double x) {
  const double q = x / (0.5 * pi);
  return std::abs(q - std::round(q)) < 1e-12;
}

/// ∫_a^b split at the multiples of π/2.
template <class F>
double integrate_split(F&& f, double a, double b) {
  double acc = 0.0, lo = a;
  for (double c = (std::floor(a / (0.5 * pi) + 1e-9) + 1.0) * 0.5 * pi; c < b - 1e-12; c += 0.5 * pi) {
    acc += integrate_graded(f, lo, c, on_quarter(lo), true);
    lo = c;
  }
  return acc + integrate_graded(f, lo, b, on_quarter(lo), on_quarter(b));
}

bool present(const QPSeries& f) { return !f.data().empty(); }

}  // namespace

double ScalarFunction::operator()(double x) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::constant: return amp;
    case Kind::arctan: return amp * std::atan(x / scale);
    case Kind::arctan_square: {
      const double u = x / scale;
      return amp * std::atan(u * u);
    }
    case Kind::tanh: return amp * std::tanh(x / scale);
  }
  return 0.0;
}

double ScalarFunction::limit(int sign) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::constant: return amp;
    case Kind::arctan: return sign * amp * 0.5 * pi;
    case Kind::arctan_square: return amp * 0.5 * pi;
    case Kind::tanh: return sign * amp;
  }
  return 0.0;
}

ScalarFunction ScalarFunction::from_name(const std::string& name, double amp, double scale) {
  ScalarFunction f;
  f.amp = amp;
  f.scale = scale;
  if (name == "zero") {
    f.kind = Kind::zero;
  } else if (name == "constant") {
    f.kind = Kind::constant;
  } else if (name == "arctan") {
    f.kind = Kind::arctan;
  } else if (name == "arctan_square") {
    f.kind = Kind::arctan_square;
  } else if (name == "tanh") {
    f.kind = Kind::tanh;
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown scalar function '" + name + "'");
  }
  if (!(scale > 0.0) || !std::isfinite(amp)) throw Error(ErrorKind::invalid_argument, "scalar function '" + name + "' needs scale > 0");
  return f;
}

std::string ScalarFunction::name() const {
  switch (kind) {
    case Kind::zero: return "zero";
    case Kind::constant: return "constant";
    case Kind::arctan: return "arctan";
    case Kind::arctan_square: return "arctan_square";
    case Kind::tanh: return "tanh";
  }
  return "?";
}

void OscillatorSpec::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw Error(ErrorKind::invalid_argument, "omega0 must be positive");
  if (!f_damp.is_even()) throw Error(ErrorKind::parity_violation, "f_damp must be even");
  if (!(r_ceiling > 0.0)) throw Error(ErrorKind::invalid_argument, "r_ceiling must be positive");
  if (!(tolerance > 0.0 && tolerance <= 1e-6)) throw Error(ErrorKind::invalid_argument, "tolerance must lie in (0, 1e-6]");
  if (present(p_force)) {
    const ModeLayout& lay = p_force.layout();
    for (std::size_t q = 0; q < lay.n_modes(); ++q) {
      auto c = p_force.mode(q);
      for (std::size_t j = 0; j < c.size(); ++j) {
        if ((lay.l_of(q) != 0 || j > 0) && c[j] != cplx{0.0}) {
          throw Error(ErrorKind::invalid_argument, "p_force must be a series in t only");
        }
      }
    }
    if (parity_residual(p_force, Parity::even) > 1e-12 || reality_residual(p_force) > 1e-12) {
      throw Error(ErrorKind::parity_violation, "p_force must be real and even");
    }
  }
}

double OscillatorSpec::forcing(double t) const {
  return present(p_force) ? eval(p_force, t, 0.0, 0.0).real() : 0.0;
}

double OscillatorSpec::section_period() const {
  return present(p_force) && p_force.freq().m() > 0 ? 2.0 * pi / std::abs(p_force.freq().omega[0]) : 2.0 * pi;
}

OrbitRecord oscillator_poincare(const OscillatorSpec& spec, Point2 z0, int n_periods, int reversal_periods) {
  spec.validate();
  if (n_periods < 0) throw Error(ErrorKind::invalid_argument, "n_periods must be >= 0");
  const double w = spec.omega0, iw = 1.0 / w;
  const SparseSeries p = present(spec.p_force) ? SparseSeries(spec.p_force) : SparseSeries();
  auto rhs = [&](const detail::State2& s, detail::State2& ds, double t) {
    ds[0] = -w * s[1];
    ds[1] = w * s[0] + iw * (spec.phi(s[0]) * spec.f_damp(w * s[1]) + spec.g_nl(s[0]) - p(t, 0.0, 0.0));
  };
  const double T = spec.section_period();
  const int nsub = static_cast<int>(std::ceil(w * T / (0.25 * pi))) + 1;

  OrbitRecord rec;
  rec.samples.reserve(static_cast<std::size_t>(n_periods) + 1);
  detail::State2 s{z0.x, z0.y};
  double theta = std::atan2(s[1], s[0]);
  rec.samples.push_back({theta, std::hypot(s[0], s[1])});
  const int n_rev = std::min(n_periods, std::max(reversal_periods, 0));
  detail::State2 at_rev = s;
  detail::Integrator integ(spec.tolerance);
  for (int j = 0; j < n_periods; ++j) {
    for (int i = 0; i < nsub; ++i) {
      const double t0 = T * (j + static_cast<double>(i) / nsub);
      const double t1 = i + 1 == nsub ? T * (j + 1) : T * (j + static_cast<double>(i + 1) / nsub);
      integ.advance(rhs, s, t0, t1);
      const double a = std::atan2(s[1], s[0]);
      theta += std::remainder(a - theta, 2.0 * pi);
    }
    const double r = std::hypot(s[0], s[1]);
    rec.samples.push_back({theta, r});
    ++rec.iterations;
    if (j + 1 == n_rev) at_rev = s;
    if (r > spec.r_ceiling) {
      rec.escaped = true;
      break;
    }
  }

  if (n_rev > 0 && rec.iterations >= n_rev) {
    detail::State2 b{at_rev[0], -at_rev[1]};
    detail::Integrator back(spec.tolerance);
    const double Tc = n_rev * T;
    for (int j = 0; j < n_rev; ++j) back.advance(rhs, b, -Tc + j * T, j + 1 == n_rev ? 0.0 : -Tc + (j + 1) * T);
    double scale = 1.0;
    for (int j = 0; j <= n_rev; ++j) scale = std::max(scale, rec.samples[static_cast<std::size_t>(j)].y);
    rec.reversibility_residual = std::max(std::abs(b[0] - z0.x), std::abs(b[1] + z0.y)) / scale;
  }

  rec.action_min = HUGE_VAL;
  rec.action_max = -HUGE_VAL;
  for (const Point2& q : rec.samples) {
    rec.action_min = std::min(rec.action_min, q.y);
    rec.action_max = std::max(rec.action_max, q.y);
  }
  if (rec.samples.size() >= 1000) {
    rec.rotation = rotation_number(rec);
    rec.has_rotation = true;
  }
  return rec;
}

double j1(const OscillatorSpec& spec, double lambda) {
  const double w = spec.omega0;
  auto f = [&](double ph) {
    const double c = std::cos(ph);
    return spec.phi(lambda * c) * spec.f_damp(w * lambda * std::sin(ph)) * c;
  };
  return integrate_split(f, 0.0, 2.0 * pi) / (2.0 * pi * lambda);
}

double j2(const OscillatorSpec& spec, double lambda) {
  auto f = [&](double ph) {
    const double c = std::cos(ph);
    return spec.g_nl(lambda * c) * c;
  };
  return integrate_split(f, 0.0, 2.0 * pi) / (2.0 * pi * lambda);
}

namespace {

double s1_integrand(const OscillatorSpec& spec, double r, double ph) {
  const double c = std::cos(ph), s = std::sin(ph);
  return (spec.phi(r * c) * spec.f_damp(spec.omega0 * r * s) + spec.g_nl(r * c)) * s;
}

double s2_integrand(const OscillatorSpec& spec, double lambda, double mean, double ph) {
  const double c = std::cos(ph);
  return (spec.phi(lambda * c) * spec.f_damp(spec.omega0 * lambda * std::sin(ph)) + spec.g_nl(lambda * c)) * c - mean;
}

}  // namespace

double s1(const OscillatorSpec& spec, double theta, double r) {
  const double w = spec.omega0;
  const double sgn = theta < 0 ? -1.0 : 1.0;
  const double v = integrate_split([&](double ph) { return s1_integrand(spec, r, ph); }, std::min(0.0, theta),
                                   std::max(0.0, theta));
  return -sgn * v / (w * w);
}

double s2(const OscillatorSpec& spec, double theta, double lambda) {
  const double w = spec.omega0;
  const double mean = lambda * (j1(spec, lambda) + j2(spec, lambda));
  const double sgn = theta < 0 ? -1.0 : 1.0;
  const double v = integrate_split([&](double ph) { return s2_integrand(spec, lambda, mean, ph); },
                                   std::min(0.0, theta), std::max(0.0, theta));
  return sgn * v / (w * w * w * lambda);
}

double S3Solution::operator()(double theta, double tau) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < kdot.size(); ++j) {
    acc += (chi_plus[j] * std::polar(1.0, theta + kdot[j] * tau)).real();
    acc += (chi_minus[j] * std::polar(1.0, -theta + kdot[j] * tau)).real();
  }
  return acc;
}

double S3Solution::d_theta(double theta, double tau) const {
  const cplx i{0.0, 1.0};
  double acc = 0.0;
  for (std::size_t j = 0; j < kdot.size(); ++j) {
    acc += (i * chi_plus[j] * std::polar(1.0, theta + kdot[j] * tau)).real();
    acc -= (i * chi_minus[j] * std::polar(1.0, -theta + kdot[j] * tau)).real();
  }
  return acc;
}

double S3Solution::d_tau(double theta, double tau) const {
  const cplx i{0.0, 1.0};
  double acc = 0.0;
  for (std::size_t j = 0; j < kdot.size(); ++j) {
    acc += (i * kdot[j] * chi_plus[j] * std::polar(1.0, theta + kdot[j] * tau)).real();
    acc += (i * kdot[j] * chi_minus[j] * std::polar(1.0, -theta + kdot[j] * tau)).real();
  }
  return acc;
}

S3Solution solve_s3(const OscillatorSpec& spec, const DiophCertificate& cert) {
  spec.validate();
  S3Solution out;
  out.omega0 = spec.omega0;
  out.min_divisor = HUGE_VAL;
  if (!present(spec.p_force)) return out;
  const QPSeries& p = spec.p_force;
  const ModeLayout& lay = p.layout();
  const auto kd = lay.k_dot(p.freq());
  const double iw = 1.0 / spec.omega0;
  const double iw3 = iw * iw * iw;
  const cplx i{0.0, 1.0};
  for (std::size_t q = 0; q < lay.n_modes(); ++q) {
    if (lay.l_of(q) != 0) continue;
    const cplx pk = p.mode(q)[0];
    if (pk == cplx{0.0}) continue;
    const std::size_t kidx = lay.kidx_of_mode(q);
    const auto k = lay.k_of(kidx);
    int kabs = 0;
    for (int v : k) kabs = std::max(kabs, std::abs(v));
    const double dp = kd[kidx] * iw + 1.0, dm = kd[kidx] * iw - 1.0;
    if (kabs > 0) {
      if (!cert.covers(kabs)) {
        throw Error(ErrorKind::invalid_argument,
                    "certificate covers |k| <= " + std::to_string(cert.k_checked) + ", forcing has |k| = " +
                        std::to_string(kabs));
      }
      const double dmin = std::min(std::abs(dp), std::abs(dm));
      if (dmin < cert.lower_bound(kabs) || dmin < 1e-14) {
        throw Error(ErrorKind::divisor_failure, "|<k,mu>/omega +- 1| = " + std::to_string(dmin) +
                                                    " below the certified bound at |k| = " + std::to_string(kabs));
      }
      out.min_divisor = std::min(out.min_divisor, dmin);
    } else {
      out.min_divisor = std::min(out.min_divisor, 1.0);
    }
    out.kdot.push_back(kd[kidx]);
    out.p.push_back(pk);
    out.chi_plus.push_back(i * iw3 * pk / (2.0 * dp));
    out.chi_minus.push_back(i * iw3 * pk / (2.0 * dm));
  }
  return out;
}

double s3_residual(const OscillatorSpec& spec, const S3Solution& s3, int n) {
  const double iw = 1.0 / spec.omega0;
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    const double th = 2.0 * pi * a / n;
    for (int b = 0; b < n; ++b) {
      const double tau = 0.37 + 50.0 * b / n;
      const double r = iw * iw * iw * spec.forcing(tau) * std::cos(th) + s3.d_theta(th, tau) + iw * s3.d_tau(th, tau);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

namespace {

struct VectorField {
  double phi, psi, phi_lead, psi_lead;
};

VectorField polar_field(const OscillatorSpec& spec, const SparseSeries& p, double r, double t, double th) {
  const double w = spec.omega0, iw = 1.0 / w;
  const double c = std::cos(th), s = std::sin(th);
  const double A = spec.phi(r * c) * spec.f_damp(w * r * s) + spec.g_nl(r * c) - p(t, 0.0, 0.0);
  const double den = w + iw * A * c / r;
  VectorField v;
  v.phi = iw * A * s / den;
  v.psi = 1.0 / den;
  v.phi_lead = iw * iw * A * s;
  v.psi_lead = iw - iw * iw * iw * A * c / r;
  return v;
}

double slope_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
  for (double v : y) {
    if (!(v > 0.0)) return std::nan("");
  }
  return loglog_slope(x, y);
}

}  // namespace

ChainReport action_angle_chain(const OscillatorSpec& spec, const DiophCertificate& cert,
                               const std::vector<double>& lambdas) {
  spec.validate();
  if (lambdas.size() < 3) throw Error(ErrorKind::invalid_argument, "need at least 3 amplitudes");
  const double w = spec.omega0, iw = 1.0 / w;
  const SparseSeries p = present(spec.p_force) ? SparseSeries(spec.p_force) : SparseSeries();
  ChainReport out;

  constexpr int n_th = 64, n_t = 16, n_r = 25;
  double C = 0.0;
  for (int a = 0; a < n_th; ++a) {
    const double th = 2.0 * pi * (a + 0.5) / n_th;
    for (int b = 0; b < n_r; ++b) {
      const double r = std::pow(10.0, 4.0 * b / (n_r - 1));
      for (int c = 0; c < n_t; ++c) {
        const double t = 50.0 * c / n_t;
        const double A = spec.phi(r * std::cos(th)) * spec.f_damp(w * r * std::sin(th)) + spec.g_nl(r * std::cos(th)) -
                         p(t, 0.0, 0.0);
        C = std::max(C, std::abs(iw * A * std::cos(th)));
      }
    }
  }
  out.amplitude_floor = 2.0 * C * iw;
  for (double l : lambdas) {
    if (!(l > out.amplitude_floor)) {
      throw Error(ErrorKind::invalid_argument, "amplitude " + std::to_string(l) + " is below the floor 2C/omega = " +
                                                   std::to_string(out.amplitude_floor));
    }
  }

  out.lambdas = lambdas;
  for (double l : lambdas) {
    out.j1.push_back(j1(spec, l));
    out.j2.push_back(j2(spec, l));
    const double mean = l * (out.j1.back() + out.j2.back());
    double c1 = 0.0, c2 = 0.0, sup1 = 0.0, sup2 = 0.0;
    for (int a = 1; a <= n_th; ++a) {
      const double lo = 2.0 * pi * (a - 1) / n_th, hi = 2.0 * pi * a / n_th;
      c1 += integrate_split([&](double ph) { return s1_integrand(spec, l, ph); }, lo, hi);
      c2 += integrate_split([&](double ph) { return s2_integrand(spec, l, mean, ph); }, lo, hi);
      sup1 = std::max(sup1, std::abs(c1));
      sup2 = std::max(sup2, std::abs(c2));
    }
    out.s1_sup.push_back(sup1 * iw * iw);
    out.s2_sup.push_back(sup2 * iw * iw * iw / l);
    double rp = 0.0, rs = 0.0;
    for (int a = 0; a < n_th; ++a) {
      const double th = 2.0 * pi * (a + 0.5) / n_th;
      for (int c = 0; c < n_t; ++c) {
        const VectorField v = polar_field(spec, p, l, 50.0 * c / n_t, th);
        rp = std::max(rp, std::abs(v.phi - v.phi_lead));
        rs = std::max(rs, std::abs(v.psi - v.psi_lead));
      }
    }
    out.phi_remainder.push_back(rp);
    out.psi_remainder.push_back(rs);
  }
  std::vector<double> aj1, aj2;
  for (double v : out.j1) aj1.push_back(std::abs(v));
  for (double v : out.j2) aj2.push_back(std::abs(v));
  out.slope_j1 = slope_or_nan(lambdas, aj1);
  out.slope_j2 = slope_or_nan(lambdas, aj2);
  out.slope_s1 = slope_or_nan(lambdas, out.s1_sup);
  out.slope_s2 = slope_or_nan(lambdas, out.s2_sup);
  out.slope_phi = slope_or_nan(lambdas, out.phi_remainder);
  out.slope_psi = slope_or_nan(lambdas, out.psi_remainder);
  out.j1_limit = (spec.phi.limit(1) - spec.phi.limit(-1)) * spec.f_damp.limit(1) / pi;
  out.j2_limit = (spec.g_nl.limit(1) - spec.g_nl.limit(-1)) / pi;

  const S3Solution s3 = solve_s3(spec, cert);
  out.s3_residual = s3_residual(spec, s3);
  out.s3_min_divisor = s3.min_divisor;
  return out;
}

TwistResult twist_coefficient(const OscillatorSpec& spec) {
  const double w = spec.omega0;
  const double a = (spec.phi.limit(1) - spec.phi.limit(-1)) * spec.f_damp.limit(1);
  const double b = spec.g_nl.limit(1) - spec.g_nl.limit(-1);
  TwistResult out;
  out.gamma1 = -2.0 / (w * w * w) * (a + b);
  out.zero_twist = std::abs(a + b) <= 1e-15 * std::max({1.0, std::abs(a), std::abs(b)});
  return out;
}

}  // namespace kamlab
