#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "stsmc/error.hpp"
#include "stsmc/kernels.hpp"
#include "stsmc/metrics.hpp"

using namespace stsmc;

namespace {

constexpr double kPi = std::numbers::pi;

SignalWindow sample(const std::function<double(double)>& f, double freq, int periods = 1, int per_period = 1000) {
  SignalWindow w;
  w.dt = 1.0 / (freq * per_period);
  w.fundamental_freq = freq;
  for (int k = 0; k <= periods * per_period; ++k) w.samples.push_back(f(k * w.dt));
  return w;
}

}  // namespace

TEST_CASE("rms") {
  const double f = 50.0, w = 2 * kPi * f;
  CHECK(rms(sample([&](double t) { return 10 * std::sin(w * t); }, f)) ==
        doctest::Approx(10 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(rms(sample([](double) { return 5.0; }, f)) == doctest::Approx(5.0).epsilon(1e-12));
  // square wave sampled off its edges
  SignalWindow sq;
  sq.dt = 1e-3;
  for (int k = 0; k < 1000; ++k) sq.samples.push_back(k % 2 ? 1.0 : -1.0);
  CHECK(rms(sq) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(rms(SignalWindow{{}, 1e-3, 50.0}), InputError);
}

TEST_CASE("fundamental component") {
  const double f = 75.0, w = 2 * kPi * f;
  const Fundamental a = fundamental_component(sample([&](double t) { return 10 * std::sin(w * t); }, f));
  CHECK(a.amplitude == doctest::Approx(10.0).epsilon(1e-3));
  CHECK(std::abs(a.phase) < 1e-3);

  const Fundamental b = fundamental_component(
      sample([&](double t) { return 10 * std::sin(w * t) + 3 * std::sin(3 * w * t); }, f));
  CHECK(b.amplitude == doctest::Approx(10.0).epsilon(1e-3));
  CHECK(std::abs(b.phase) < 1e-3);

  const Fundamental c = fundamental_component(sample([&](double t) { return 10 * std::sin(w * t - kPi / 3); }, f));
  CHECK(c.phase == doctest::Approx(-kPi / 3).epsilon(1e-3));

  SignalWindow bad = sample([&](double t) { return std::sin(w * t); }, f);
  bad.samples.resize(bad.samples.size() / 2);
  CHECK_THROWS_AS(fundamental_component(bad), InputError);
}

TEST_CASE("phase power factor") {
  const double f = 50.0, w = 2 * kPi * f;
  auto v = sample([&](double t) { return std::sin(w * t); }, f);

  const PhasePowerFactor same = phase_power_factor(v, v);
  CHECK(same.pf == doctest::Approx(1.0).epsilon(1e-3));

  const PhasePowerFactor h =
      phase_power_factor(sample([&](double t) { return std::sin(w * t) + std::sin(3 * w * t); }, f), v);
  CHECK(h.pf_h == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(h.pf_d == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(h.pf == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(thd_from_pf_h(h.pf_h) == doctest::Approx(1.0).epsilon(1e-3));

  const PhasePowerFactor d = phase_power_factor(sample([&](double t) { return std::sin(w * t - kPi / 3); }, f), v);
  CHECK(d.pf == doctest::Approx(0.5).epsilon(1e-3));

  SignalWindow zero = v;
  for (double& x : zero.samples) x = 0.0;
  zero.t0 = 1.25;
  try {
    phase_power_factor(zero, v);
    FAIL("expected PowerFactorError");
  } catch (const PowerFactorError& e) {
    CHECK(e.time() == 1.25);
  }
}

TEST_CASE("total power factor") {
  CHECK(total_power_factor(1, 1, 1) == 1.0);
  CHECK(total_power_factor(0.99, 0.99, 0.99) == doctest::Approx(0.970299).epsilon(1e-12));
  CHECK(total_power_factor(1, 1, 0) == 0.0);
}

TEST_CASE("metric properties") {
  const double f = 60.0, w = 2 * kPi * f;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto v = sample([&](double t) { return std::sin(w * t); }, f);
  auto v4 = sample([&](double t) { return std::sin(w * t); }, f, 4);

  for (int i = 0; i < 50; ++i) {
    const double a1 = 1 + u(rng), ph = u(rng), ah = 0.5 * std::abs(u(rng)) + 0.01;
    const int kh = 2 + int(std::abs(u(rng)) * 6);
    auto clean = [&](double t) { return a1 * std::sin(w * t + ph); };
    auto dirty = [&](double t) { return clean(t) + ah * std::sin(kh * w * t + 0.3); };

    const PhasePowerFactor pc = phase_power_factor(sample(clean, f), v);
    const PhasePowerFactor pd = phase_power_factor(sample(dirty, f), v);
    CHECK(pd.pf_h <= 1.0);
    CHECK(pd.pf_h < pc.pf_h);

    // amplitude scaling invariance
    const double s = 0.1 + 10 * std::abs(u(rng));
    const PhasePowerFactor ps = phase_power_factor(sample([&](double t) { return s * dirty(t); }, f), v);
    CHECK(ps.pf == doctest::Approx(pd.pf).epsilon(1e-9));

    // window-length robustness
    const PhasePowerFactor p4 = phase_power_factor(sample(dirty, f, 4), v4);
    CHECK(std::abs(p4.pf - pd.pf) <= 0.005 * std::abs(pd.pf) + 1e-12);
  }
}

TEST_CASE("simd kernels agree with the scalar reference") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (std::size_t n : {0, 1, 2, 3, 7, 8, 9, 15, 16, 17, 100, 1333, 4097}) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = u(rng);
      y[i] = u(rng);
    }
    const double ref_sq = kernels::scalar::trapz_sumsq(x.data(), n);
    const double ref_dot = kernels::scalar::trapz_dot(x.data(), y.data(), n);
    double mag = 1e-300;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]) + x[i] * x[i];
#if defined(STSMC_HAVE_AVX2)
    if (kernels::avx2_available()) {
      CHECK(std::abs(kernels::avx2::trapz_sumsq(x.data(), n) - ref_sq) <= 1e-14 * mag);
      CHECK(std::abs(kernels::avx2::trapz_dot(x.data(), y.data(), n) - ref_dot) <= 1e-14 * mag);
    }
#endif
    CHECK(std::abs(kernels::trapz_sumsq(x.data(), n) - ref_sq) <= 1e-14 * mag);
    CHECK(std::abs(kernels::trapz_dot(x.data(), y.data(), n) - ref_dot) <= 1e-14 * mag);

    // independent trapezoid
    double t = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) t += 0.5 * (x[i] * y[i] + x[i + 1] * y[i + 1]);
    CHECK(std::abs(ref_dot - t) <= 1e-13 * mag);
  }
}

TEST_CASE("forced scalar dispatch gives the same metrics") {
  const double f = 50.0, w = 2 * kPi * f;
  auto i = sample([&](double t) { return 3 * std::sin(w * t - 0.2) + 0.4 * std::sin(5 * w * t); }, f, 1, 1333);
  auto v = sample([&](double t) { return std::sin(w * t); }, f, 1, 1333);
  const PhasePowerFactor fast = phase_power_factor(i, v);
  kernels::force_scalar(true);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  const PhasePowerFactor slow = phase_power_factor(i, v);
  kernels::force_scalar(false);
  CHECK(fast.pf == doctest::Approx(slow.pf).epsilon(1e-13));
  CHECK(fast.pf_h == doctest::Approx(slow.pf_h).epsilon(1e-13));
}
