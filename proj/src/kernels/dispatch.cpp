#include <atomic>
#include <cstdlib>

#include "stsmc/kernels.hpp"

namespace stsmc::kernels {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(STSMC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool env_forces_scalar() noexcept {
  const char* v = std::getenv("STSMC_FORCE_SCALAR");
  return v != nullptr && v[0] != '\0' && v[0] != '0';
}

std::atomic<bool>& forced() {
  static std::atomic<bool> flag{env_forces_scalar()};
  return flag;
}

}  // namespace

bool avx2_available() noexcept {
  static const bool ok = cpu_has_avx2();
  return ok;
}

Isa active_isa() noexcept {
  return (avx2_available() && !forced().load(std::memory_order_relaxed)) ? Isa::avx2 : Isa::scalar;
}

void force_scalar(bool on) noexcept { forced().store(on, std::memory_order_relaxed); }

double trapz_sumsq(const double* x, std::size_t n) noexcept {
#if defined(STSMC_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::trapz_sumsq(x, n);
#endif
  return scalar::trapz_sumsq(x, n);
}

double trapz_dot(const double* x, const double* y, std::size_t n) noexcept {
#if defined(STSMC_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::trapz_dot(x, y, n);
#endif
  return scalar::trapz_dot(x, y, n);
}

}  // namespace stsmc::kernels
