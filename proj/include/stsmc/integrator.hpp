#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace stsmc {

/// Classical fourth-order Runge-Kutta step for a fixed-size state.
/// `rhs(t, x)` returns dx/dt. Discontinuous inputs must be held by the caller.
template <std::size_t N, class Rhs>
std::array<double, N> integrate_step(const std::array<double, N>& x, double t, double dt, Rhs&& rhs) {
  auto axpy = [](const std::array<double, N>& a, double h, const std::array<double, N>& b) {
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + h * b[i];
    return out;
  };

  const std::array<double, N> k1 = rhs(t, x);
  const std::array<double, N> k2 = rhs(t + 0.5 * dt, axpy(x, 0.5 * dt, k1));
  const std::array<double, N> k3 = rhs(t + 0.5 * dt, axpy(x, 0.5 * dt, k2));
  const std::array<double, N> k4 = rhs(t + dt, axpy(x, dt, k3));

  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

template <std::size_t N>
bool all_finite(const std::array<double, N>& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace stsmc
