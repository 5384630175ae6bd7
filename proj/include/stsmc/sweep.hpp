#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "stsmc/summary.hpp"

namespace stsmc {

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// "key=v1,v2,..." -> axis. Throws ConfigError on a malformed text.
SweepAxis parse_axis(const std::string& text);

struct SweepRow {
  std::size_t index = 0;
  std::vector<std::pair<std::string, std::string>> assignment;
  std::string status = "ok";  ///< ok | config_error | divergence | reference_error | pf_error | error
  std::string message;
  RunSummary summary;
};

/// Runs the cartesian product of the axes (no axes = one nominal run) on up
/// to `threads` workers. Failures are recorded per row. When `out_dir` is not
/// empty each run writes its artifacts to out_dir/run_NNN.
std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::vector<SweepAxis>& axes,
                                const std::string& out_dir, unsigned threads);

/// Combined table, one row per run.
void write_sweep_csv(std::ostream& os, const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows);

}  // namespace stsmc
