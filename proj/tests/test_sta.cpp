#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "stsmc/error.hpp"
#include "stsmc/sta.hpp"

using namespace stsmc;

TEST_CASE("sta_step: zero error is an exact equilibrium") {
  const StOutput out = sta_step({0.0}, 0.0, {3.0, 2.0, 1.0}, 1e-3);
  CHECK(out.mu == 0.0);
  CHECK(out.state.z == 0.0);
}

TEST_CASE("sta_step: direct evaluation") {
  // 2*sqrt(4)*1 + 1*1*0.001
  const StOutput a = sta_step({0.0}, 4.0, {2.0, 1.0, 0.5}, 0.001);
  CHECK(a.mu == doctest::Approx(4.001).epsilon(1e-14));
  CHECK(a.state.z == doctest::Approx(0.001).epsilon(1e-14));

  // 1*0.5*(-1) + 0.1 with no integration
  const StOutput b = sta_step({0.1}, -0.25, {1.0, 1.0, 0.5}, 0.0);
  CHECK(b.mu == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(b.state.z == 0.1);
}

TEST_CASE("sta_step: rejects bad input") {
  const StGains g{1.0, 1.0, 0.5};
  CHECK_THROWS_AS(sta_step({0.0}, std::nan(""), g, 1e-3), InputError);
  CHECK_THROWS_AS(sta_step({0.0}, std::numeric_limits<double>::infinity(), g, 1e-3), InputError);
  CHECK_THROWS_AS(sta_step({0.0}, 1.0, g, -1e-3), InputError);
  CHECK_THROWS_AS(sta_step({0.0}, 1.0, g, std::nan("")), InputError);
}

TEST_CASE("validate_gains") {
  CHECK(validate_gains({2.0, 2.0, 1.0}));
  CHECK_FALSE(validate_gains({2.0, 0.5, 1.0}));
  CHECK_FALSE(validate_gains({1.0, 2.0, 1.0}));
  CHECK_FALSE(validate_gains({2.0, 1.0, 1.0}));  // alpha == F
  CHECK_FALSE(validate_gains({-3.0, 2.0, 1.0}));
}

TEST_CASE("sta properties: continuity, homogeneity, drift bound") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> e_dist(-5.0, 5.0);
  const StGains g{2.5, 3.0, 1.0};
  auto sroot = [](double e) { return std::sqrt(std::abs(e)) * (e > 0 ? 1.0 : (e < 0 ? -1.0 : 0.0)); };

  for (int i = 0; i < 1000; ++i) {
    const double e1 = e_dist(rng), e2 = e_dist(rng);
    const double z = e_dist(rng);
    const double m1 = sta_step({z}, e1, g, 0.0).mu;
    const double m2 = sta_step({z}, e2, g, 0.0).mu;
    CHECK(std::abs(m1 - m2) <= g.lambda * std::abs(sroot(e1) - sroot(e2)) + 1e-12);

    const double c = 0.5 + std::abs(e_dist(rng));
    CHECK(sta_step({0.0}, c * c * e1, g, 0.0).mu == doctest::Approx(c * m1 - c * z).epsilon(1e-12));
  }

  StState s{0.4};
  const double dt = 1e-3;
  const int n = 500;
  for (int k = 0; k < n; ++k) s = sta_step(s, e_dist(rng), g, dt).state;
  CHECK(std::abs(s.z - 0.4) <= n * g.alpha * dt + 1e-12);
}
