#include "stsmc/kernels.hpp"

namespace stsmc::kernels::scalar {

double trapz_sumsq(const double* x, std::size_t n) noexcept {
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc - 0.5 * (x[0] * x[0] + x[n - 1] * x[n - 1]);
}

double trapz_dot(const double* x, const double* y, std::size_t n) noexcept {
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc - 0.5 * (x[0] * y[0] + x[n - 1] * y[n - 1]);
}

}  // namespace stsmc::kernels::scalar
