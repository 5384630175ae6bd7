#pragma once

#include <cmath>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "stsmc/simulator.hpp"

namespace stsmc {

/// Steady-state statistics over the last five source periods of a segment
/// (the interval between consecutive events).
struct SegmentStats {
  double t_start = 0.0;
  double t_end = 0.0;
  double r_load = 0.0;
  double omega = 0.0;
  double u0_mean = 0.0;
  double u0_ripple = 0.0;  ///< max - min [V]
  double pf_mean = 0.0;    ///< mean PF_total over complete windows
  int pf_windows = 0;
  double power_residual = 0.0;  ///< |mean balance residual| / mean(U0^2/R_L)
  double r_hat_error_pct = 0.0;
};

struct RunSummary {
  std::string id;
  std::string controller;
  std::string mode;
  std::vector<SegmentStats> segments;
  double overshoot_pct = 0.0;
  double settling_time = 0.0;      ///< into the +-1 % band after start [s]
  double recovery_time = 0.0;      ///< into the band after the first load event [s]; NaN without one
  double pf_min_after_event = 0.0; ///< NaN without events
  double r_hat_track_time = 0.0;   ///< R_hat within 2 % after the first load event [s]
  double reach_time = 0.0;
  long saturation_count = 0;
  double last_saturation_time = 0.0;
  double u0_final = 0.0;
  double runtime_s = 0.0;
};

RunSummary summarize(const Trace& trace, const ScenarioConfig& cfg);

/// `key = value` lines.
void write_summary(std::ostream& os, const RunSummary& s);
std::map<std::string, std::string> read_summary(std::istream& is);

/// Time after `t_from` (relative to it) from which `value(rec)` stays within
/// `tol` of `target` for every record up to `t_to`. NaN if it never settles.
template <class Fn>
double settle_time(const Trace& trace, double t_from, double t_to, Fn value, double target, double tol) {
  double entered = std::numeric_limits<double>::quiet_NaN();
  for (const TraceRecord& r : trace.records) {
    if (r.t < t_from || r.t > t_to) continue;
    if (std::abs(value(r) - target) <= tol) {
      if (std::isnan(entered)) entered = r.t;
    } else {
      entered = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return std::isnan(entered) ? entered : entered - t_from;
}

/// Least-squares fit of log(y) = c - rate * t over samples with y > 0.
struct ExpFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int samples = 0;
};
ExpFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y);

/// Event times bounding the steady segments: {0, events..., t_end}.
std::vector<double> segment_bounds(const ScenarioConfig& cfg);

}  // namespace stsmc
