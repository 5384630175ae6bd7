#include "stsmc/summary.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace stsmc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<double> segment_bounds(const ScenarioConfig& cfg) {
  std::vector<double> b{0.0};
  for (const Event& e : cfg.events)
    if (e.time > b.back() && e.time < cfg.t_end) b.push_back(e.time);
  b.push_back(cfg.t_end);
  return b;
}

RunSummary summarize(const Trace& trace, const ScenarioConfig& cfg) {
  RunSummary s;
  s.id = trace.id;
  s.controller = to_string(cfg.controller);
  s.mode = to_string(cfg.mode);

  const std::vector<double> bounds = segment_bounds(cfg);
  const double tol = 0.01 * cfg.u0_ref;
  const double eps = 0.5 * trace.dt;

  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    SegmentStats seg;
    seg.t_start = bounds[i];
    seg.t_end = bounds[i + 1];
    const ConverterParams p = apply_events(cfg, seg.t_start, cfg.params);
    seg.r_load = p.r_load;
    seg.omega = p.omega;
    const bool last = i + 2 == bounds.size();
    const double a = std::max(seg.t_start, seg.t_end - 5.0 * 2.0 * std::numbers::pi / p.omega);

    double u_sum = 0.0, u_min = std::numeric_limits<double>::infinity(), u_max = -u_min;
    double res_sum = 0.0, load_sum = 0.0, rhat_sum = 0.0;
    int n = 0;
    for (const TraceRecord& r : trace.records) {
      if (r.t < a - eps) continue;
      if (last ? r.t > seg.t_end + eps : r.t >= seg.t_end - eps) continue;
      u_sum += r.u0;
      u_min = std::min(u_min, r.u0);
      u_max = std::max(u_max, r.u0);
      const double load = r.u0 * r.u0 / p.r_load;
      res_sum += 1.5 * (r.i_q * p.e_mag - p.r * (r.i_d * r.i_d + r.i_q * r.i_q)) - load;
      load_sum += load;
      rhat_sum += std::abs(r.r_hat - p.r_load) / p.r_load;
      ++n;
    }
    if (n > 0) {
      seg.u0_mean = u_sum / n;
      seg.u0_ripple = u_max - u_min;
      seg.power_residual = std::abs(res_sum) / load_sum;
      seg.r_hat_error_pct = 100.0 * rhat_sum / n;
    } else {
      seg.u0_mean = seg.u0_ripple = seg.power_residual = seg.r_hat_error_pct = kNaN;
    }

    double pf_sum = 0.0;
    for (const PfWindowResult& w : trace.pf_windows) {
      if (w.t_start < a - eps || w.t_end > seg.t_end + eps) continue;
      pf_sum += w.report.pf_total;
      ++seg.pf_windows;
    }
    seg.pf_mean = seg.pf_windows > 0 ? pf_sum / seg.pf_windows : kNaN;
    s.segments.push_back(seg);
  }

  double u_max = -std::numeric_limits<double>::infinity();
  for (const TraceRecord& r : trace.records) u_max = std::max(u_max, r.u0);
  s.overshoot_pct = trace.records.empty() ? kNaN : std::max(0.0, 100.0 * (u_max - cfg.u0_ref) / cfg.u0_ref);

  auto u0_of = [](const TraceRecord& r) { return r.u0; };
  s.settling_time = settle_time(trace, 0.0, bounds[1], u0_of, cfg.u0_ref, tol);

  s.recovery_time = kNaN;
  s.r_hat_track_time = kNaN;
  s.pf_min_after_event = kNaN;
  for (const Event& e : cfg.events) {
    if (e.field != EventField::r_load || e.time >= cfg.t_end) continue;
    double until = cfg.t_end;
    for (const Event& f : cfg.events)
      if (f.time > e.time) {
        until = f.time - eps;
        break;
      }
    s.recovery_time = settle_time(trace, e.time, until, u0_of, cfg.u0_ref, tol);
    s.r_hat_track_time = settle_time(trace, e.time, until, [](const TraceRecord& r) { return r.r_hat; }, e.value,
                                     0.02 * e.value);
    break;
  }
  if (!cfg.events.empty()) {
    const double t_ev = cfg.events.front().time;
    for (const PfWindowResult& w : trace.pf_windows)
      if (w.t_start >= t_ev - eps)
        s.pf_min_after_event = std::isnan(s.pf_min_after_event) ? w.report.pf_total
                                                                : std::min(s.pf_min_after_event, w.report.pf_total);
  }

  s.reach_time = trace.diag.reach_time;
  s.saturation_count = trace.diag.saturation_steps;
  s.last_saturation_time = trace.diag.last_saturation_time;
  s.u0_final = trace.records.empty() ? kNaN : trace.records.back().u0;
  s.runtime_s = trace.diag.runtime_s;
  return s;
}

void write_summary(std::ostream& os, const RunSummary& s) {
  auto kv = [&](const std::string& k, auto v) { fmt::print(os, "{} = {}\n", k, v); };
  auto kd = [&](const std::string& k, double v) { fmt::print(os, "{} = {:.9g}\n", k, v); };
  kv("id", s.id);
  kv("controller", s.controller);
  kv("mode", s.mode);
  kv("segments", s.segments.size());
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const SegmentStats& g = s.segments[i];
    const std::string p = fmt::format("segment.{}.", i);
    kd(p + "t_start", g.t_start);
    kd(p + "t_end", g.t_end);
    kd(p + "r_load", g.r_load);
    kd(p + "omega", g.omega);
    kd(p + "u0_mean", g.u0_mean);
    kd(p + "u0_ripple", g.u0_ripple);
    kd(p + "pf_total_mean", g.pf_mean);
    kv(p + "pf_windows", g.pf_windows);
    kd(p + "power_residual", g.power_residual);
    kd(p + "r_hat_error_pct", g.r_hat_error_pct);
  }
  kd("overshoot_pct", s.overshoot_pct);
  kd("settling_time", s.settling_time);
  kd("recovery_time", s.recovery_time);
  kd("pf_total_min_after_event", s.pf_min_after_event);
  kd("r_hat_track_time", s.r_hat_track_time);
  kd("reach_time", s.reach_time);
  kv("saturation_count", s.saturation_count);
  kd("last_saturation_time", s.last_saturation_time);
  kd("u0_final", s.u0_final);
  kd("runtime_s", s.runtime_s);
}

std::map<std::string, std::string> read_summary(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

ExpFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y) {
  double st = 0, sy = 0, stt = 0, sty = 0, syy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
    syy += ly * ly;
    ++n;
  }
  ExpFit fit;
  fit.samples = n;
  if (n < 2) return fit;
  const double vt = stt - st * st / n;
  const double vy = syy - sy * sy / n;
  const double cty = sty - st * sy / n;
  const double slope = cty / vt;
  fit.rate = -slope;
  fit.intercept = (sy - slope * st) / n;
  fit.r2 = vy > 0.0 ? cty * cty / (vt * vy) : 1.0;
  return fit;
}

}  // namespace stsmc
