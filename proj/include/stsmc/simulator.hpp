#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stsmc/controller.hpp"
#include "stsmc/metrics.hpp"
#include "stsmc/observer.hpp"
#include "stsmc/plant.hpp"
#include "stsmc/sta.hpp"

namespace stsmc {

enum class SimMode { averaged, switched };
enum class ControllerKind { st, pi, ideal, fixed };
enum class LoadModel { actual, estimated };
enum class EventField { r_load, omega };

const char* to_string(SimMode m);
const char* to_string(ControllerKind c);
const char* to_string(EventField f);

struct Event {
  double time = 0.0;
  EventField field = EventField::r_load;
  double value = 0.0;
};

struct ObserverConfig {
  StGains gains{2e4, 1e8, 5e7};
  double kappa = 1.0;
  double e3_threshold = 1e-3;
  LoadModel load_model = LoadModel::actual;
  double i_d_initial = 0.0;
  double i_q_initial = 0.0;
  double u0_initial = std::numeric_limits<double>::quiet_NaN();  ///< NaN = measured U0(0)
};

struct ScenarioConfig {
  std::string id = "scenario";
  ConverterParams params{0.02, 2e-3, 1e-4, 50.0, 50.0, 150.0, 150.0 * 3.141592653589793};
  double u0_ref = 650.0;
  double u0_initial = 5.0;
  double i_d_initial = 0.0;
  double i_q_initial = 0.0;
  double t_end = 2.0;
  double dt = 0.0;  ///< 0 = mode default
  SimMode mode = SimMode::averaged;
  double carrier_freq = 1e4;
  int substeps_per_carrier = 100;
  ControllerKind controller = ControllerKind::st;
  std::vector<Event> events;

  ObserverConfig observer;
  LoadObserverConfig load_observer{{1e4, 1e7, 5e6}, 1e-3, 0.0};
  StGains st_d{2000.0, 1e6, 5e5};
  StGains st_q{2000.0, 1e6, 5e5};
  double u0_floor = 1.0;
  double ref_derivative_tau = 1e-3;
  PiTuning pi;
  DqControl fixed_u{};

  int decimate = 100;
  std::uint64_t seed = 0;
  double noise_std = 0.0;       ///< measurement noise on U0 [V]; 0 = off
  double control_period = 0.0;  ///< sample-and-hold period [s]; 0 = every step

  /// Step actually used: `dt` or the mode default (10 us averaged,
  /// carrier period / substeps_per_carrier switched).
  double resolved_dt() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Params with every event whose time is <= t applied on top of `params`.
ConverterParams apply_events(const ScenarioConfig& cfg, double t, ConverterParams params);

namespace flags {
inline constexpr std::uint32_t saturated = 1u << 0;
inline constexpr std::uint32_t control_held = 1u << 1;
inline constexpr std::uint32_t load_estimate_held = 1u << 2;
inline constexpr std::uint32_t observer_sliding = 1u << 3;
inline constexpr std::uint32_t pf_reversed = 1u << 4;
inline constexpr std::uint32_t event = 1u << 5;
}  // namespace flags

struct TraceRecord {
  double t = 0.0;
  Vec3 i_abc{};
  double i_d = 0.0, i_q = 0.0, u0 = 0.0;
  double i_d_hat = 0.0, i_q_hat = 0.0, u0_hat = 0.0, r_hat = 0.0;
  double i_d_ref = 0.0, i_q_ref = 0.0;
  double u_d = 0.0, u_q = 0.0;
  std::array<double, 3> pf{};
  double pf_total = 0.0;
  std::uint32_t flags = 0;  ///< OR over the steps since the previous record

  // in-memory only
  double theta = 0.0;
  double e3 = 0.0;
  double s_d_hat = 0.0, s_q_hat = 0.0;
  double r_load = 0.0;
  double omega = 0.0;
  std::array<std::int8_t, 3> switches{};
};

struct PfWindowResult {
  double t_start = 0.0;
  double t_end = 0.0;
  PowerFactorReport report;
};

struct RunDiagnostics {
  long steps = 0;
  long saturation_steps = 0;
  double last_saturation_time = std::numeric_limits<double>::quiet_NaN();
  /// First time after which |e3| < 1e-3 * U0* for the rest of the run (NaN if never).
  double reach_time = std::numeric_limits<double>::quiet_NaN();
  long load_hold_steps = 0;
  double runtime_s = 0.0;
};

struct Trace {
  std::string id;
  double dt = 0.0;
  int decimate = 1;
  std::vector<TraceRecord> records;
  std::vector<PfWindowResult> pf_windows;
  RunDiagnostics diag;
};

/// Runs one scenario. Throws ConfigError before the first step, and
/// DivergenceError / ReferenceError / PowerFactorError (with the simulated
/// time) while running. Identical configs give identical traces.
Trace run_scenario(const ScenarioConfig& cfg);

}  // namespace stsmc
