#pragma once

#include <array>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "kamlab/error.hpp"

namespace kamlab::detail {

using State2 = std::array<double, 2>;

/// Controlled Runge–Kutta–Fehlberg 7(8) stepping that keeps its step size
/// between calls and always lands exactly on the requested end time.
class Integrator {
 public:
  explicit Integrator(double tol, double dt0 = 0.05)
      : stepper_(boost::numeric::odeint::make_controlled(tol, tol, Stepper())), dt_(dt0) {}

  template <class System>
  void advance(System&& sys, State2& z, double t0, double t1) {
    if (t1 < t0) throw Error(ErrorKind::invalid_argument, "integration runs forward in time only");
    double t = t0;
    long steps = 0;
    while (t1 - t > 1e-15 * std::max(1.0, std::abs(t1))) {
      const double dt_free = dt_;
      const bool clipped = t + dt_ > t1;
      double dt = clipped ? t1 - t : dt_;
      boost::numeric::odeint::controlled_step_result res;
      try {
        res = stepper_.try_step(sys, z, t, dt);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw Error(ErrorKind::integrator_failure, e.what());
      }
      if (res == boost::numeric::odeint::success) {
        dt_ = clipped ? std::max(dt_free, dt) : dt;
        if (clipped) t = t1;
        if (!std::isfinite(z[0]) || !std::isfinite(z[1])) {
          throw Error(ErrorKind::integrator_failure, "non-finite state at t = " + std::to_string(t));
        }
      } else {
        dt_ = dt;
      }
      if (dt_ < 1e-12 || ++steps > 50000000) {
        throw Error(ErrorKind::integrator_failure, "step size collapsed at t = " + std::to_string(t));
      }
    }
  }

 private:
  using Stepper = boost::numeric::odeint::runge_kutta_fehlberg78<State2>;
  using Controlled = boost::numeric::odeint::controlled_runge_kutta<Stepper>;
  Controlled stepper_;
  double dt_;
};

}  // namespace kamlab::detail
