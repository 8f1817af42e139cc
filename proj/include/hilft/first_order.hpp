#pragma once

#include <cmath>

namespace hilft {

// Exact solution of x' = a - b x over `dt` with a, b held constant.
template <typename Scalar>
Scalar exact_linear_step(Scalar x, Scalar a, Scalar b, Scalar dt) {
  using std::exp;
  if (b == Scalar(0)) return x + a * dt;
  const Scalar eq = a / b;
  return eq + (x - eq) * exp(-b * dt);
}

// Integral of x(t) over [0, dt] along the same exact trajectory.
template <typename Scalar>
Scalar exact_linear_integral(Scalar x, Scalar a, Scalar b, Scalar dt) {
  using std::expm1;
  if (b == Scalar(0)) return x * dt + a * dt * dt / Scalar(2);
  const Scalar eq = a / b;
  return eq * dt - (x - eq) * expm1(-b * dt) / b;
}

// First-order lag toward `target` with time constant tau; tau <= 0 snaps.
template <typename Scalar>
Scalar first_order_lag(Scalar value, Scalar target, Scalar tau, Scalar dt) {
  using std::exp;
  if (!(tau > Scalar(0))) return target;
  return target + (value - target) * exp(-dt / tau);
}

}  // namespace hilft
