#pragma once

#include <cstddef>

namespace stsmc::kernels {

// Trapezoid-weighted window reductions (end samples weighted 1/2). Multiply
// by the sample spacing to get the integral.

enum class Isa { scalar, avx2 };

namespace scalar {
double trapz_sumsq(const double* x, std::size_t n) noexcept;
double trapz_dot(const double* x, const double* y, std::size_t n) noexcept;
}  // namespace scalar

#if defined(STSMC_HAVE_AVX2)
namespace avx2 {
double trapz_sumsq(const double* x, std::size_t n) noexcept;
double trapz_dot(const double* x, const double* y, std::size_t n) noexcept;
}  // namespace avx2
#endif

/// Dispatched entry points. The AVX2 path is taken when it was compiled in,
/// the CPU reports AVX2 and FMA, and STSMC_FORCE_SCALAR is not set.
double trapz_sumsq(const double* x, std::size_t n) noexcept;
double trapz_dot(const double* x, const double* y, std::size_t n) noexcept;

Isa active_isa() noexcept;
/// True if the running CPU could take the AVX2 path (ignores forcing).
bool avx2_available() noexcept;
/// Overrides the selection for the rest of the process (tests, benchmarks).
void force_scalar(bool on) noexcept;

}  // namespace stsmc::kernels
