// End-to-end acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "stsmc/checks.hpp"
#include "stsmc/config.hpp"
#include "stsmc/error.hpp"
#include "stsmc/metrics.hpp"
#include "stsmc/summary.hpp"

using namespace stsmc;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

ScenarioConfig reference_scenario() { return load_config(std::string(STSMC_SOURCE_DIR) + "/configs/reference.toml"); }

struct Runs {
  ScenarioConfig cfg;
  Trace trace;
  RunSummary summary;
};

Runs run(ScenarioConfig cfg) {
  Trace t = run_scenario(cfg);
  RunSummary s = summarize(t, cfg);
  return {std::move(cfg), std::move(t), std::move(s)};
}

double iq_oracle(double E, double r, double R, double U) {
  return E / (2 * r) - 0.5 * std::sqrt(E * E / (r * r) - 8 * U * U / (3 * R * r));
}

// Observer-convergence experiment: plant held at the 50 Ohm operating point
// by its steady control, observer started from zero current estimates.
Runs convergence_run() {
  ScenarioConfig c = reference_scenario();
  c.events.clear();
  c.t_end = 0.1;
  c.decimate = 1;
  c.controller = ControllerKind::fixed;
  const double U = c.u0_ref, E = c.params.e_mag, r = c.params.r, L = c.params.l_ind, w = c.params.omega;
  const double iq = iq_oracle(E, r, c.params.r_load, U);
  c.u0_initial = U;
  c.i_d_initial = 0.0;
  c.i_q_initial = iq;
  c.fixed_u = {2 * L / U * w * iq, 2 * L / U * (E / L - r / L * iq)};
  c.observer.i_d_initial = 0.0;
  c.observer.i_q_initial = 0.0;
  return run(c);
}

struct SlidingPortion {
  std::vector<double> t, norm;
  double floor = 0.0;
};

SlidingPortion sliding_portion(const Runs& cr) {
  const auto& rec = cr.trace.records;
  auto enorm = [](const TraceRecord& r) { return std::hypot(r.i_d - r.i_d_hat, r.i_q - r.i_q_hat); };
  SlidingPortion sp;
  for (std::size_t i = rec.size() * 3 / 4; i < rec.size(); ++i) sp.floor = std::max(sp.floor, enorm(rec[i]));
  for (const TraceRecord& r : rec) {
    if (!(r.t >= cr.trace.diag.reach_time)) continue;
    const double n = enorm(r);
    if (n <= 10.0 * sp.floor) break;
    sp.t.push_back(r.t);
    sp.norm.push_back(n);
  }
  return sp;
}

}  // namespace

int main() {
  std::vector<std::pair<int, std::function<Outcome()>>> criteria;

  Runs st, pi, sw;
  bool runs_ok = true;
  std::string run_error;
  try {
    st = run(reference_scenario());
    ScenarioConfig cp = reference_scenario();
    cp.controller = ControllerKind::pi;
    pi = run(cp);
    ScenarioConfig cs = reference_scenario();
    cs.mode = SimMode::switched;
    cs.decimate = 1000;
    sw = run(cs);
  } catch (const std::exception& e) {
    runs_ok = false;
    run_error = e.what();
  }

  auto needs_runs = [&](Outcome& o) {
    if (!runs_ok) o.require(false, "scenario runs failed: " + run_error);
    return runs_ok;
  };

  criteria.push_back({1, [&] {
    Outcome o;
    if (!needs_runs(o)) return o;
    for (std::size_t i = 0; i < st.summary.segments.size(); ++i) {
      const double pf = st.summary.segments[i].pf_mean;
      o.require(pf >= 0.97, fmt::format("segment {} PF_total {:.5f} >= 0.97", i, pf));
    }
    o.require(st.summary.segments.size() == 3, "three segments");
    return o;
  }});

  criteria.push_back({2, [&] {
    Outcome o;
    if (!needs_runs(o)) return o;
    for (std::size_t i = 0; i < st.summary.segments.size(); ++i) {
      const double u = st.summary.segments[i].u0_mean;
      o.require(std::abs(u - 650.0) <= 6.5, fmt::format("segment {} mean U0 {:.3f} V", i, u));
    }
    o.require(st.summary.recovery_time <= 0.2, fmt::format("recovery {:.4f} s <= 0.2 s", st.summary.recovery_time));
    return o;
  }});

  criteria.push_back({3, [&] {
    Outcome o;
    const double a = reference_currents(150.0, 0.02, 50.0, 650.0).i_q_ref;
    const double b = reference_currents(150.0, 0.02, 40.0, 650.0).i_q_ref;
    const double oa = 150.0 / 0.04 - 0.5 * std::sqrt(150.0 * 150.0 / 0.0004 - 8.0 * 650.0 * 650.0 / (3.0 * 50.0 * 0.02));
    const double ob = 150.0 / 0.04 - 0.5 * std::sqrt(150.0 * 150.0 / 0.0004 - 8.0 * 650.0 * 650.0 / (3.0 * 40.0 * 0.02));
    o.require(std::abs(a - 37.74) <= 0.01 && std::abs(a - oa) <= 0.01, fmt::format("i_q*(50) = {:.4f} A", a));
    o.require(std::abs(b - 47.24) <= 0.01 && std::abs(b - ob) <= 0.01, fmt::format("i_q*(40) = {:.4f} A", b));
    const ConverterParams p{0.02, 2e-3, 1e-4, 50.0, 50.0, 150.0, 150.0 * kPi};
    const double bound = p.max_output_voltage(50.0);
    o.require(std::abs(bound - 150.0 * std::sqrt(937.5)) < 1e-9 && std::abs(bound - 4592.8) < 0.1 && bound >= 650.0,
              fmt::format("U0* bound {:.2f} V", bound));
    return o;
  }});

  criteria.push_back({4, [&] {
    Outcome o;
    if (!needs_runs(o)) return o;
    for (std::size_t i = 0; i < st.summary.segments.size(); ++i) {
      const double res = st.summary.segments[i].power_residual;
      o.require(res <= 0.01, fmt::format("segment {} residual {:.2e}", i, res));
    }
    return o;
  }});

  Runs conv;
  bool conv_ok = true;
  try {
    conv = convergence_run();
  } catch (const std::exception& e) {
    conv_ok = false;
    run_error = e.what();
  }

  criteria.push_back({5, [&] {
    Outcome o;
    if (!needs_runs(o)) return o;
    o.require(st.trace.diag.reach_time <= 0.05, fmt::format("scenario reach {:.4g} s", st.trace.diag.reach_time));
    if (!conv_ok) {
      o.require(false, "convergence run failed: " + run_error);
      return o;
    }
    o.require(conv.trace.diag.reach_time <= 0.05,
              fmt::format("convergence-run reach {:.4g} s and stays below 0.65 V", conv.trace.diag.reach_time));
    const SlidingPortion sp = sliding_portion(conv);
    const ExpFit fit = fit_exponential(sp.t, sp.norm);
    o.require(sp.t.size() >= 10 && fit.rate >= 10.0,
              fmt::format("decay rate {:.1f} 1/s >= r/L = 10 over {} samples", fit.rate, sp.t.size()));
    return o;
  }});

  criteria.push_back({6, [&] {
    Outcome o;
    if (!conv_ok) {
      o.require(false, "convergence run failed: " + run_error);
      return o;
    }
    const SlidingPortion sp = sliding_portion(conv);
    const double L = 2e-3, r = 0.02;
    int good = 0, total = 0;
    for (std::size_t i = 1; i + 1 < sp.t.size(); ++i) {
      const double v_prev = L / (2 * r) * sp.norm[i - 1] * sp.norm[i - 1];
      const double v_next = L / (2 * r) * sp.norm[i + 1] * sp.norm[i + 1];
      const double vdot = (v_next - v_prev) / (sp.t[i + 1] - sp.t[i - 1]);
      const double n2 = sp.norm[i] * sp.norm[i];
      good += vdot <= -(1.0 - 0.05) * n2;
      ++total;
    }
    const double frac = total ? double(good) / total : 0.0;
    o.require(total >= 10 && frac >= 0.99, fmt::format("{:.2f} % of {} samples satisfy dV/dt <= -|e|^2", 100 * frac, total));
    return o;
  }});

  criteria.push_back({7, [&] {
    Outcome o;
    if (!needs_runs(o)) return o;
    o.require(st.summary.r_hat_track_time <= 0.1,
              fmt::format("R_hat within 2 % of 40 Ohm after {:.4f} s", st.summary.r_hat_track_time));
    double rh = 0.0;
    const bool ok = estimate_load(50.0, 650.0, 1e-4, -32500.0, 1e-3, rh);
    o.require(ok && std::abs(rh - 40.0) <= 1e-12, fmt::format("closed form gives {:.15g}", rh));
    return o;
  }});

  criteria.push_back({8, [&] {
    Outcome o;
    ScenarioConfig c = reference_scenario();
    c.events.clear();
    c.controller = ControllerKind::ideal;
    c.t_end = 0.05;
    c.decimate = 1;
    const Runs ideal = run(c);
    const double tau = zero_dynamics_time_constant(ideal.trace, c);
    const double expect = 50.0 * 1e-4 / 2.0;
    o.require(std::abs(tau - expect) <= 0.05 * expect, fmt::format("tau {:.5f} ms vs 2.5 ms", 1e3 * tau));
    return o;
  }});

  criteria.push_back({9, [&] {
    Outcome o;
    double worst = 0.0, norm_err = 0.0;
    for (int k = 0; k < 360; ++k) {
      const double wt = 2 * kPi * k / 360.0;
      for (const SwitchVector& s : SwitchVector::all()) {
        const Vec2 d = park_transform(wt, s.as_vector());
        worst = std::max(worst, std::hypot(d[0], d[1]));
      }
      // largest singular value from the 2x2 Gram matrix of the written-out rows
      double g00 = 0, g01 = 0, g11 = 0;
      for (int j = 0; j < 3; ++j) {
        const double a = wt - j * 2 * kPi / 3;
        const double c = -2.0 / 3.0 * std::cos(a), s = 2.0 / 3.0 * std::sin(a);
        g00 += c * c;
        g01 += c * s;
        g11 += s * s;
      }
      const double sigma = std::sqrt(0.5 * (g00 + g11) + std::hypot(0.5 * (g00 - g11), g01));
      norm_err = std::max({norm_err, std::abs(sigma - std::sqrt(2.0 / 3.0)),
                           std::abs(park_matrix_norm(wt) - std::sqrt(2.0 / 3.0))});
    }
    o.require(worst <= std::sqrt(2.0) + 1e-12, fmt::format("max |T u| = {:.12f} <= sqrt 2", worst));
    o.require(norm_err <= 1e-12, fmt::format("| |T| - sqrt(2/3) | = {:.1e}", norm_err));
    return o;
  }});

  criteria.push_back({10, [&] {
    Outcome o;
    if (!needs_runs(o)) return o;
    o.require(pi.summary.overshoot_pct > st.summary.overshoot_pct,
              fmt::format("overshoot PI {:.3f} % > ST {:.3f} %", pi.summary.overshoot_pct, st.summary.overshoot_pct));
    o.require(pi.summary.pf_min_after_event < st.summary.pf_min_after_event,
              fmt::format("min PF_total after load step PI {:.5f} < ST {:.5f}", pi.summary.pf_min_after_event,
                          st.summary.pf_min_after_event));
    return o;
  }});

  criteria.push_back({11, [&] {
    Outcome o;
    if (!needs_runs(o)) return o;
    for (std::size_t i = 0; i < st.summary.segments.size() && i < sw.summary.segments.size(); ++i) {
      const double a = st.summary.segments[i].u0_mean, b = sw.summary.segments[i].u0_mean;
      o.require(std::abs(a - b) <= 0.02 * a, fmt::format("segment {} U0 averaged {:.3f} / switched {:.3f}", i, a, b));
    }
    const int n = sw.cfg.substeps_per_carrier;
    double worst = 0.0;
    for (int j = 0; j <= 40; ++j) {
      const double m = -1.0 + j * 0.05;
      for (double th : {0.0, 1.0, 2.5, 4.0}) {
        // phase-a reference m with zero-sum companions
        const Vec2 u = park_transform(th, {m, -0.5 * m, -0.5 * m});
        double avg = 0.0;
        for (int k = 0; k < n; ++k) avg += pwm_modulate({u[0], u[1]}, th, (k + 0.5) / n)[0];
        worst = std::max(worst, std::abs(avg / n - m));
      }
    }
    o.require(worst <= 2.0 / n + 1e-12, fmt::format("PWM duty error {:.4f} <= one substep {:.4f}", worst, 2.0 / n));
    return o;
  }});

  criteria.push_back({12, [&] {
    Outcome o;
    const double f = 50.0, w = 2 * kPi * f;
    auto sample = [&](const std::function<double(double)>& g) {
      SignalWindow s;
      s.dt = 1.0 / (f * 2000);
      s.fundamental_freq = f;
      for (int k = 0; k <= 2000; ++k) s.samples.push_back(g(k * s.dt));
      return s;
    };
    const SignalWindow v = sample([&](double t) { return std::sin(w * t); });
    const double r = rms(sample([&](double t) { return 10 * std::sin(w * t); }));
    o.require(std::abs(r - 10 / std::sqrt(2.0)) <= 1e-3 * 10 / std::sqrt(2.0), fmt::format("RMS {:.5f}", r));
    const PhasePowerFactor h = phase_power_factor(sample([&](double t) { return std::sin(w * t) + std::sin(3 * w * t); }), v);
    o.require(std::abs(h.pf - 1 / std::sqrt(2.0)) <= 1e-3 / std::sqrt(2.0), fmt::format("harmonic PF {:.5f}", h.pf));
    const PhasePowerFactor d = phase_power_factor(sample([&](double t) { return std::sin(w * t - kPi / 3); }), v);
    o.require(std::abs(d.pf - 0.5) <= 0.5e-3, fmt::format("displacement PF {:.5f}", d.pf));
    return o;
  }});

  int failed = 0;
  for (auto& [id, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
