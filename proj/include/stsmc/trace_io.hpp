#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stsmc/simulator.hpp"

namespace stsmc {

inline constexpr const char* kTraceHeader =
    "t,ia,ib,ic,id,iq,u0,id_hat,iq_hat,u0_hat,rl_hat,id_ref,iq_ref,ud,uq,pf1,pf2,pf3,pf_total,flags";

/// One row per record, 9 significant digits, NaN written as "nan".
void write_trace_csv(std::ostream& os, const Trace& trace);

/// Reads the CSV columns back (in-memory-only fields stay default).
/// Throws IoError on a wrong header or malformed row.
std::vector<TraceRecord> read_trace_csv(std::istream& is);

/// Python/matplotlib script that renders the figure set from trace.csv in
/// its own directory.
std::string plot_script();

/// Writes trace.csv, summary.txt and plot_trace.py into `dir` (created if
/// needed). Throws IoError.
void write_run_artifacts(const std::string& dir, const Trace& trace, const std::string& summary_text);

}  // namespace stsmc
