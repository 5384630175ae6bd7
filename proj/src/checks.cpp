#include "stsmc/checks.hpp"

#include <cmath>

#include <fmt/format.h>

namespace stsmc {

double zero_dynamics_time_constant(const Trace& trace, const ScenarioConfig& cfg) {
  const double target = cfg.u0_ref * cfg.u0_ref;
  const double t_stop = cfg.events.empty() ? cfg.t_end : cfg.events.front().time;
  std::vector<double> t, y;
  for (const TraceRecord& r : trace.records) {
    if (r.t >= t_stop) break;
    const double dev = std::abs(r.u0 * r.u0 - target);
    if (dev <= 1e-3 * target) break;
    t.push_back(r.t);
    y.push_back(dev);
  }
  if (t.size() < 3) return std::nan("");
  const ExpFit fit = fit_exponential(t, y);
  return 1.0 / fit.rate;
}

std::vector<CheckResult> run_checks(const Trace& trace, const RunSummary& s, const ScenarioConfig& cfg) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool pass, std::string detail) {
    out.push_back({std::move(name), pass, std::move(detail)});
  };

  if (cfg.controller == ControllerKind::ideal) {
    const double tau = zero_dynamics_time_constant(trace, cfg);
    const double expect = cfg.params.r_load * cfg.params.c_cap / 2.0;
    add("zero_dynamics_time_constant", std::abs(tau - expect) <= 0.05 * expect,
        fmt::format("tau = {:.6g} s, R_L C / 2 = {:.6g} s", tau, expect));
    return out;
  }

  const double band = 0.01 * cfg.u0_ref;
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const SegmentStats& g = s.segments[i];
    add(fmt::format("segment{}_pf_total", i), g.pf_mean >= 0.97, fmt::format("mean PF_total = {:.6f}", g.pf_mean));
    add(fmt::format("segment{}_u0_band", i), std::abs(g.u0_mean - cfg.u0_ref) <= band,
        fmt::format("mean U0 = {:.4f} V", g.u0_mean));
    add(fmt::format("segment{}_power_balance", i), g.power_residual <= 0.01,
        fmt::format("residual = {:.3e}", g.power_residual));
  }

  bool has_load_event = false;
  for (const Event& e : cfg.events)
    if (e.field == EventField::r_load && e.time < cfg.t_end) has_load_event = true;
  if (has_load_event) {
    add("load_step_recovery", s.recovery_time <= 0.2, fmt::format("recovery = {:.4g} s", s.recovery_time));
    add("load_estimate_tracking", s.r_hat_track_time <= 0.1,
        fmt::format("R_hat within 2 % after {:.4g} s", s.r_hat_track_time));
  }
  add("observer_reach", s.reach_time <= 0.05, fmt::format("reach = {:.4g} s", s.reach_time));
  return out;
}

}  // namespace stsmc
