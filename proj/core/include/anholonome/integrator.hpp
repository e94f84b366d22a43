#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "anholonome/errors.hpp"

namespace anholonome {

enum class Method { rk4, euler };

Method parse_method(std::string_view name);
std::string_view method_name(Method method);

/// Sample times 0 = t_0 < t_1 < ... < t_N = T on a grid of step h; the last
/// step is shortened so the final sample lands on T exactly. T == 0 yields {0}.
std::vector<double> sample_times(double h, double t_final);

namespace detail {

template <class Rhs>
Eigen::VectorXd take_step(Method method, const Rhs& rhs, const Eigen::VectorXd& y, double dt) {
  if (method == Method::euler) return y + dt * rhs(y);
  const Eigen::VectorXd k1 = rhs(y);
  const Eigen::VectorXd k2 = rhs(Eigen::VectorXd(y + 0.5 * dt * k1));
  const Eigen::VectorXd k3 = rhs(Eigen::VectorXd(y + 0.5 * dt * k2));
  const Eigen::VectorXd k4 = rhs(Eigen::VectorXd(y + dt * k3));
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Fixed-step integration of the autonomous system y' = rhs(y). `observe(t, y)`
/// is called at every sample, including t = 0. Library errors raised by rhs
/// and non-finite states are rethrown as DynamicsError carrying the time of
/// the failing step.
template <class Rhs, class Observer>
void integrate_fixed(Method method, const Rhs& rhs, Eigen::VectorXd y, double h, double t_final,
                     Observer&& observe) {
  const std::vector<double> times = sample_times(h, t_final);
  observe(times.front(), y);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double t0 = times[i - 1];
    try {
      y = detail::take_step(method, rhs, y, times[i] - t0);
    } catch (const DynamicsError&) {
      throw;
    } catch (const Error& e) {
      throw DynamicsError(t0, e.what());
    }
    if (!y.allFinite()) throw DynamicsError(t0, "non-finite state");
    observe(times[i], y);
  }
}

}  // namespace anholonome
