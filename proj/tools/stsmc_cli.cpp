// Batch front end: single runs and parameter sweeps over scenario files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stsmc/checks.hpp"
#include "stsmc/config.hpp"
#include "stsmc/error.hpp"
#include "stsmc/sweep.hpp"
#include "stsmc/trace_io.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kFileNotFound = 3,
  kDivergence = 4,
  kReference = 5,
  kPowerFactor = 6,
  kCheckFailed = 7,
  kIo = 8,
  kInternal = 9,
};

struct RunOptions {
  std::string config;
  std::string controller;
  std::string mode;
  double dt = 0.0;
  double t_end = -1.0;
  int decimate = 0;
  std::string out = "out";
  bool check = false;
};

struct SweepOptions {
  std::string config;
  std::vector<std::string> axes;
  std::string out = "sweep_out";
  unsigned threads = 0;
  bool traces = false;
};

stsmc::ScenarioConfig load_with_overrides(const RunOptions& o) {
  stsmc::ScenarioConfig cfg = stsmc::load_config(o.config);
  if (!o.controller.empty()) stsmc::apply_override(cfg, "controller", o.controller);
  if (!o.mode.empty()) stsmc::apply_override(cfg, "mode", o.mode);
  if (o.dt > 0.0) cfg.dt = o.dt;
  if (o.t_end >= 0.0) {
    // a shortened run drops the events it never reaches
    cfg.t_end = o.t_end;
    std::erase_if(cfg.events, [&](const stsmc::Event& e) { return e.time > cfg.t_end; });
  }
  if (o.decimate > 0) cfg.decimate = o.decimate;
  if (cfg.controller == stsmc::ControllerKind::ideal) cfg.events.clear();
  cfg.validate();
  return cfg;
}

int do_run(const RunOptions& o) {
  const stsmc::ScenarioConfig cfg = load_with_overrides(o);
  const stsmc::Trace trace = stsmc::run_scenario(cfg);
  const stsmc::RunSummary summary = stsmc::summarize(trace, cfg);

  std::ostringstream text;
  stsmc::write_summary(text, summary);
  int code = kOk;
  if (o.check) {
    bool all = true;
    for (const stsmc::CheckResult& c : stsmc::run_checks(trace, summary, cfg)) {
      text << "check." << c.name << " = " << (c.pass ? "pass" : "FAIL") << "  # " << c.detail << '\n';
      all = all && c.pass;
    }
    text << "check.all = " << (all ? "pass" : "FAIL") << '\n';
    if (!all) code = kCheckFailed;
  }
  stsmc::write_run_artifacts(o.out, trace, text.str());
  std::cout << text.str();
  std::cout << fmt::format("wrote {}/trace.csv, {}/summary.txt, {}/plot_trace.py\n", o.out, o.out, o.out);
  return code;
}

int do_sweep(const SweepOptions& o) {
  const stsmc::ScenarioConfig base = stsmc::load_config(o.config);
  std::vector<stsmc::SweepAxis> axes;
  for (const std::string& a : o.axes) axes.push_back(stsmc::parse_axis(a));
  const unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());

  const auto rows = stsmc::run_sweep(base, axes, o.traces ? o.out : std::string(), threads);
  std::filesystem::create_directories(o.out);
  const std::string path = o.out + "/sweep.csv";
  std::ofstream f(path);
  if (!f) throw stsmc::IoError("cannot write " + path);
  stsmc::write_sweep_csv(f, axes, rows);
  stsmc::write_sweep_csv(std::cout, axes, rows);

  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  std::cerr << fmt::format("{} runs, {} failed; table in {}\n", rows.size(), failed, path);
  return kOk;
}

template <class Fn>
int guarded(Fn fn) {
  try {
    return fn();
  } catch (const stsmc::FileNotFoundError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFileNotFound;
  } catch (const stsmc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const stsmc::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kDivergence;
  } catch (const stsmc::ReferenceError& e) {
    std::cerr << "reference constraint violated: " << e.what() << '\n';
    return kReference;
  } catch (const stsmc::PowerFactorError& e) {
    std::cerr << "power factor undefined: " << e.what() << '\n';
    return kPowerFactor;
  } catch (const stsmc::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Super-twisting rectifier control simulator"};
  app.require_subcommand(1);

  RunOptions ro;
  CLI::App* run = app.add_subcommand("run", "Simulate one scenario");
  run->add_option("config", ro.config, "Scenario file")->required();
  run->add_option("--controller", ro.controller, "Controller override")->check(CLI::IsMember({"st", "pi", "ideal"}));
  run->add_option("--mode", ro.mode, "Plant model override")->check(CLI::IsMember({"averaged", "switched"}));
  run->add_option("--dt", ro.dt, "Integration step [s]")->check(CLI::PositiveNumber);
  run->add_option("--t-end", ro.t_end, "Simulated horizon [s]")->check(CLI::NonNegativeNumber);
  run->add_option("--decimate", ro.decimate, "Keep every n-th step in the trace")->check(CLI::PositiveNumber);
  run->add_option("--out", ro.out, "Output directory")->capture_default_str();
  run->add_flag("--check", ro.check, "Evaluate acceptance thresholds; exit 7 if any fails");

  SweepOptions so;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter grid");
  sweep->add_option("config", so.config, "Scenario template")->required();
  sweep->add_option("--axis", so.axes, "key=v1,v2,... (repeatable)");
  sweep->add_option("--out", so.out, "Output directory")->capture_default_str();
  sweep->add_option("--threads", so.threads, "Worker threads (0 = all cores)");
  sweep->add_flag("--traces", so.traces, "Also write per-run artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*run) return guarded([&] { return do_run(ro); });
  return guarded([&] { return do_sweep(so); });
}
