#include "stsmc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "stsmc/config.hpp"
#include "stsmc/error.hpp"
#include "stsmc/trace_io.hpp"

namespace stsmc {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

SweepAxis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError(text, 0, "axis must be key=v1,v2,...");
  SweepAxis axis;
  axis.key = trim(text.substr(0, eq));
  if (axis.key.empty()) throw ConfigError(text, 0, "axis key is empty");
  std::stringstream ss(text.substr(eq + 1));
  std::string v;
  while (std::getline(ss, v, ',')) {
    v = trim(v);
    if (!v.empty()) axis.values.push_back(v);
  }
  return axis;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const std::vector<SweepAxis>& axes,
                                const std::string& out_dir, unsigned threads) {
  std::vector<const SweepAxis*> active;
  std::size_t total = 1;
  for (const SweepAxis& a : axes)
    if (!a.values.empty()) {
      active.push_back(&a);
      total *= a.values.size();
    }

  std::vector<SweepRow> rows(total);
  for (std::size_t i = 0; i < total; ++i) {
    rows[i].index = i;
    std::size_t rem = i;
    for (auto it = active.rbegin(); it != active.rend(); ++it) {
      const SweepAxis& a = **it;
      rows[i].assignment.insert(rows[i].assignment.begin(), {a.key, a.values[rem % a.values.size()]});
      rem /= a.values.size();
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      SweepRow& row = rows[i];
      ScenarioConfig cfg = base;
      cfg.id = fmt::format("{}_run{:03d}", base.id, i);
      try {
        for (const auto& [k, v] : row.assignment) apply_override(cfg, k, v);
        const Trace trace = run_scenario(cfg);
        row.summary = summarize(trace, cfg);
        if (!out_dir.empty()) {
          std::ostringstream ss;
          write_summary(ss, row.summary);
          write_run_artifacts(fmt::format("{}/run_{:03d}", out_dir, i), trace, ss.str());
        }
      } catch (const ConfigError& e) {
        row.status = "config_error";
        row.message = e.what();
      } catch (const DivergenceError& e) {
        row.status = "divergence";
        row.message = e.what();
      } catch (const ReferenceError& e) {
        row.status = "reference_error";
        row.message = e.what();
      } catch (const PowerFactorError& e) {
        row.status = "pf_error";
        row.message = e.what();
      } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(threads, unsigned(total)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows) {
  std::vector<std::string> keys;
  for (const SweepAxis& a : axes)
    if (!a.values.empty()) keys.push_back(a.key);
  std::size_t n_seg = 0;
  for (const SweepRow& r : rows) n_seg = std::max(n_seg, r.summary.segments.size());

  os << "run";
  for (const std::string& k : keys) os << ',' << csv_cell(k);
  os << ",status";
  for (std::size_t s = 0; s < n_seg; ++s) os << ",seg" << s << "_u0_mean,seg" << s << "_pf_total";
  os << ",overshoot_pct,recovery_time,pf_total_min_after_event,r_hat_track_time,reach_time,saturation_count,"
        "runtime_s,message\n";

  for (const SweepRow& r : rows) {
    os << r.index;
    for (const auto& [k, v] : r.assignment) os << ',' << csv_cell(v);
    os << ',' << r.status;
    const RunSummary& s = r.summary;
    for (std::size_t i = 0; i < n_seg; ++i) {
      if (i < s.segments.size())
        fmt::print(os, ",{:.9g},{:.9g}", s.segments[i].u0_mean, s.segments[i].pf_mean);
      else
        os << ",,";
    }
    if (r.status == "ok")
      fmt::print(os, ",{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{},{:.6g}", s.overshoot_pct, s.recovery_time,
                 s.pf_min_after_event, s.r_hat_track_time, s.reach_time, s.saturation_count, s.runtime_s);
    else
      os << ",,,,,,,";
    os << ',' << csv_cell(r.message) << '\n';
  }
}

}  // namespace stsmc
