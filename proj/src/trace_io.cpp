#include "stsmc/trace_io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "stsmc/error.hpp"

namespace stsmc {

namespace {

constexpr int kColumns = 20;

void put(std::string& line, double v) {
  if (std::isnan(v))
    line += "nan";
  else
    fmt::format_to(std::back_inserter(line), "{:.9g}", v);
}

double parse_field(const std::string& s, int row) {
  if (s == "nan") return std::nan("");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw IoError(fmt::format("trace row {}: bad number '{}'", row, s));
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << kTraceHeader << '\n';
  std::string line;
  for (const TraceRecord& r : trace.records) {
    line.clear();
    const double vals[] = {r.t,       r.i_abc[0], r.i_abc[1], r.i_abc[2], r.i_d,     r.i_q,   r.u0,
                           r.i_d_hat, r.i_q_hat,  r.u0_hat,   r.r_hat,    r.i_d_ref, r.i_q_ref, r.u_d,
                           r.u_q,     r.pf[0],    r.pf[1],    r.pf[2],    r.pf_total};
    for (double v : vals) {
      put(line, v);
      line += ',';
    }
    line += std::to_string(r.flags);
    line += '\n';
    os << line;
  }
  if (!os) throw IoError("failed writing trace");
}

std::vector<TraceRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw IoError("unexpected trace header");

  std::vector<TraceRecord> out;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (int(cells.size()) != kColumns) throw IoError(fmt::format("trace row {}: expected {} columns", row, kColumns));
    double v[kColumns - 1];
    for (int i = 0; i < kColumns - 1; ++i) v[i] = parse_field(cells[i], row);
    TraceRecord r;
    r.t = v[0];
    r.i_abc = {v[1], v[2], v[3]};
    r.i_d = v[4];
    r.i_q = v[5];
    r.u0 = v[6];
    r.i_d_hat = v[7];
    r.i_q_hat = v[8];
    r.u0_hat = v[9];
    r.r_hat = v[10];
    r.i_d_ref = v[11];
    r.i_q_ref = v[12];
    r.u_d = v[13];
    r.u_q = v[14];
    r.pf = {v[15], v[16], v[17]};
    r.pf_total = v[18];
    char* end = nullptr;
    const unsigned long f = std::strtoul(cells[19].c_str(), &end, 10);
    if (cells[19].empty() || *end != '\0') throw IoError(fmt::format("trace row {}: bad flags", row));
    r.flags = std::uint32_t(f);
    out.push_back(r);
  }
  return out;
}

std::string plot_script() {
  return R"(#!/usr/bin/env python3
# Renders the run figures from trace.csv next to this script.
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "trace.csv")
d = np.genfromtxt(path, delimiter=",", names=True)
t = d["t"]


def save(fig, name):
    fig.tight_layout()
    fig.savefig(os.path.join(here, name), dpi=120)
    plt.close(fig)


fig, ax = plt.subplots(3, 1, sharex=True, figsize=(8, 7))
for a, col in zip(ax, ("ia", "ib", "ic")):
    a.plot(t, d[col], lw=0.6)
    a.set_ylabel(col + " [A]")
ax[-1].set_xlabel("t [s]")
save(fig, "fig_phase_currents.png")

fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(t, d["u0"], label="U0")
ax.plot(t, d["u0_hat"], "--", label="U0 estimate")
ax.set_xlabel("t [s]")
ax.set_ylabel("V")
ax.legend()
save(fig, "fig_output_voltage.png")

fig, ax = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
ax[0].plot(t, d["id"], label="i_d")
ax[0].plot(t, d["id_hat"], "--", label="i_d estimate")
ax[0].plot(t, d["id_ref"], ":", label="i_d ref")
ax[1].plot(t, d["iq"], label="i_q")
ax[1].plot(t, d["iq_hat"], "--", label="i_q estimate")
ax[1].plot(t, d["iq_ref"], ":", label="i_q ref")
for a in ax:
    a.set_ylabel("A")
    a.legend()
ax[-1].set_xlabel("t [s]")
save(fig, "fig_dq_currents.png")

fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(t, d["pf1"], label="PF a")
ax.plot(t, d["pf2"], label="PF b")
ax.plot(t, d["pf3"], label="PF c")
ax.plot(t, d["pf_total"], "k", label="PF total")
ax.set_xlabel("t [s]")
ax.legend()
save(fig, "fig_power_factor.png")

fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(t, d["rl_hat"])
ax.set_xlabel("t [s]")
ax.set_ylabel("load estimate [Ohm]")
save(fig, "fig_load_estimate.png")

fig, ax = plt.subplots(figsize=(8, 4))
ax.plot(t, d["ud"], label="u_d")
ax.plot(t, d["uq"], label="u_q")
ax.set_xlabel("t [s]")
ax.legend()
save(fig, "fig_control.png")
)";
}

void write_run_artifacts(const std::string& dir, const Trace& trace, const std::string& summary_text) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());

  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw IoError("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    std::ofstream f = open("trace.csv");
    write_trace_csv(f, trace);
  }
  {
    std::ofstream f = open("summary.txt");
    f << summary_text;
  }
  {
    std::ofstream f = open("plot_trace.py");
    f << plot_script();
  }
}

}  // namespace stsmc
