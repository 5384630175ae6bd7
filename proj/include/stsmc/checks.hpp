#pragma once

#include <string>
#include <vector>

#include "stsmc/summary.hpp"

namespace stsmc {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Thresholds applied by `run --check`:
///   steady PF_total >= 0.97 and mean U0 within +-1 % of U0* in every segment,
///   recovery into the band within 0.2 s of the first load event,
///   power-balance residual <= 1 %, R_hat within 2 % of the new load within 0.1 s,
///   |e3| < 1e-3 U0* within 0.05 s. In ideal-current-loop mode the fitted
///   time constant of U0^2 - U0*^2 must match R_L C / 2 within 5 %.
std::vector<CheckResult> run_checks(const Trace& trace, const RunSummary& summary, const ScenarioConfig& cfg);

/// Fitted time constant of |U0^2 - U0*^2| over the records where it exceeds
/// 1e-3 U0*^2 and precede the first event (NaN with fewer than 3 samples).
double zero_dynamics_time_constant(const Trace& trace, const ScenarioConfig& cfg);

}  // namespace stsmc
