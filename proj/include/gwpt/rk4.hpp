#pragma once

namespace gwpt {

/// Classical four-stage Runge-Kutta step.
///
/// `State` must provide a free function `axpy(y, a, k)` returning y + a*k,
/// found by ADL. Derivatives are expressed as the same type, with the time
/// field of a derivative equal to 1 so that axpy advances time as well.
template <typename State, typename Rhs>
State rk4_step(const State& y, Rhs&& rhs, double dt)
{
  const State k1 = rhs(y);
  const State k2 = rhs(axpy(y, 0.5 * dt, k1));
  const State k3 = rhs(axpy(y, 0.5 * dt, k2));
  const State k4 = rhs(axpy(y, dt, k3));
  State out = axpy(y, dt / 6.0, k1);
  out = axpy(out, dt / 3.0, k2);
  out = axpy(out, dt / 3.0, k3);
  return axpy(out, dt / 6.0, k4);
}

}  // namespace gwpt
