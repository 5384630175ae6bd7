#include "stsmc/simulator.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "stsmc/error.hpp"
#include "stsmc/integrator.hpp"

namespace stsmc {

const char* to_string(SimMode m) { return m == SimMode::averaged ? "averaged" : "switched"; }

const char* to_string(ControllerKind c) {
  switch (c) {
    case ControllerKind::st: return "st";
    case ControllerKind::pi: return "pi";
    case ControllerKind::ideal: return "ideal";
    case ControllerKind::fixed: return "fixed";
  }
  return "?";
}

const char* to_string(EventField f) { return f == EventField::r_load ? "r_load" : "omega"; }

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool event_due(double event_time, double t) { return t >= event_time - 1e-12 * std::max(1.0, event_time); }

}  // namespace

double ScenarioConfig::resolved_dt() const {
  if (dt > 0.0) return dt;
  if (mode == SimMode::switched) return 1.0 / (carrier_freq * substeps_per_carrier);
  return 1e-5;
}

void ScenarioConfig::validate() const {
  params.validate();
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(key, 0, "must be finite and > 0");
  };
  positive(u0_ref, "u0_ref");
  positive(u0_initial, "u0_initial");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end", 0, "must be finite and >= 0");
  if (dt < 0.0 || !std::isfinite(dt)) throw ConfigError("dt", 0, "must be > 0 (or omitted)");
  positive(carrier_freq, "carrier_freq");
  if (substeps_per_carrier < 2) throw ConfigError("substeps_per_carrier", 0, "must be >= 2");
  if (decimate < 1) throw ConfigError("decimate", 0, "must be >= 1");
  if (noise_std < 0.0) throw ConfigError("noise_std", 0, "must be >= 0");
  if (control_period < 0.0) throw ConfigError("control_period", 0, "must be >= 0");
  positive(u0_floor, "u0_floor");
  positive(ref_derivative_tau, "ref_derivative_tau");
  if (!std::isfinite(i_d_initial) || !std::isfinite(i_q_initial))
    throw ConfigError("initial currents", 0, "must be finite");

  const double h = resolved_dt();
  if (mode == SimMode::switched) {
    const double ratio = 1.0 / (carrier_freq * h);
    if (std::abs(ratio - std::round(ratio)) > 1e-6 * ratio || std::round(ratio) < 2.0)
      throw ConfigError("dt", 0, "in switched mode dt must divide the carrier period");
    if (controller == ControllerKind::ideal)
      throw ConfigError("controller", 0, "the ideal current loop is only defined in averaged mode");
  }

  double prev = 0.0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    const std::string key = "events[" + std::to_string(i) + "]";
    if (!(e.time >= prev) || e.time > t_end) throw ConfigError(key + ".time", 0, "events must be time-sorted within [0, t_end]");
    if (!(e.value > 0.0) || !std::isfinite(e.value)) throw ConfigError(key + ".value", 0, "must be finite and > 0");
    prev = e.time;
  }

  if (controller != ControllerKind::ideal) {
    if (!validate_gains(observer.gains)) throw ConfigError("observer", 0, "gains violate alpha > F, lambda^2 > alpha");
    if (!validate_gains(load_observer.gains))
      throw ConfigError("load_observer", 0, "gains violate alpha > F, lambda^2 > alpha");
    positive(observer.kappa, "observer.kappa");
    positive(observer.e3_threshold, "observer.e3_threshold");
    positive(load_observer.den_eps, "load_observer.den_eps");
    if (load_observer.filter_tau < 0.0) throw ConfigError("load_observer.filter_tau", 0, "must be >= 0");
  }
  if (controller == ControllerKind::st) {
    if (!validate_gains(st_d)) throw ConfigError("st_control.d", 0, "gains violate alpha > F, lambda^2 > alpha");
    if (!validate_gains(st_q)) throw ConfigError("st_control.q", 0, "gains violate alpha > F, lambda^2 > alpha");
  }
  if (controller == ControllerKind::pi) {
    positive(pi.current_bandwidth_hz, "pi_control.current_bandwidth_hz");
    positive(pi.voltage_bandwidth_hz, "pi_control.voltage_bandwidth_hz");
    positive(pi.voltage_damping, "pi_control.voltage_damping");
    positive(pi.i_q_max, "pi_control.i_q_max");
  }
}

ConverterParams apply_events(const ScenarioConfig& cfg, double t, ConverterParams params) {
  for (const Event& e : cfg.events) {
    if (!event_due(e.time, t)) continue;
    if (e.field == EventField::r_load)
      params.r_load = e.value;
    else
      params.omega = e.value;
  }
  return params;
}

namespace {

using State = std::array<double, 9>;
// [0..2] plant currents (i_d, i_q, - averaged; i_a, i_b, i_c switched)
// [3] U0, [4] theta, [5..7] observer estimates, [8] load-observer U0 estimate
constexpr std::size_t kU0 = 3, kTheta = 4, kIdHat = 5, kIqHat = 6, kU0Hat = 7, kU0Load = 8;
// far beyond any physical current or voltage of the converter
constexpr double kDivergenceBound = 1e9;

bool out_of_bounds(const State& x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (i != kTheta && std::abs(x[i]) > kDivergenceBound) return true;
  return false;
}

class PfAccumulator {
 public:
  void restart(double t, double theta, double omega) {
    for (auto& v : i_) v.clear();
    for (auto& v : v_) v.clear();
    t_start_ = t;
    theta_start_ = theta;
    omega_ = omega;
  }

  /// Adds a sample; returns true when a full period has been collected, in
  /// which case `out` holds the window result and a new window starts at this sample.
  bool push(double t, double theta, const Vec3& i_abc, const Vec3& v_abc, double dt, PfWindowResult& out) {
    for (int k = 0; k < 3; ++k) {
      i_[k].push_back(i_abc[k]);
      v_[k].push_back(v_abc[k]);
    }
    if (theta - theta_start_ < kTwoPi * (1.0 - 1e-12)) return false;

    std::array<SignalWindow, 3> iw;
    std::array<SignalWindow, 3> vw;
    const double f = omega_ / kTwoPi;
    for (int k = 0; k < 3; ++k) {
      iw[k] = SignalWindow{std::move(i_[k]), dt, f, t_start_};
      vw[k] = SignalWindow{std::move(v_[k]), dt, f, t_start_};
    }
    out.t_start = t_start_;
    out.t_end = t;
    out.report = power_factor_report(iw, vw);
    restart(t, theta, omega_);
    for (int k = 0; k < 3; ++k) {
      i_[k].push_back(i_abc[k]);
      v_[k].push_back(v_abc[k]);
    }
    return true;
  }

 private:
  std::array<std::vector<double>, 3> i_;
  std::array<std::vector<double>, 3> v_;
  double t_start_ = 0.0;
  double theta_start_ = 0.0;
  double omega_ = 0.0;
};

}  // namespace

Trace run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto wall_start = std::chrono::steady_clock::now();

  const double dt = cfg.resolved_dt();
  const long n_steps = std::lround(cfg.t_end / dt);
  const bool switched = cfg.mode == SimMode::switched;
  const bool ideal = cfg.controller == ControllerKind::ideal;
  const bool observers = !ideal;
  const long hold_steps = cfg.control_period > 0.0 ? std::max(1L, std::lround(cfg.control_period / dt)) : 1L;
  const long carrier_steps = switched ? std::lround(1.0 / (cfg.carrier_freq * dt)) : 1L;
  const double reach_threshold = 1e-3 * cfg.u0_ref;

  Trace trace;
  trace.id = cfg.id;
  trace.dt = dt;
  trace.decimate = cfg.decimate;
  trace.records.reserve(std::size_t(n_steps / cfg.decimate + 1));

  ConverterParams p = cfg.params;

  State x{};
  x[kU0] = cfg.u0_initial;
  if (switched) {
    const Vec3 i0 = inverse_park(0.0, {cfg.i_d_initial, cfg.i_q_initial});
    x[0] = i0[0];
    x[1] = i0[1];
    x[2] = i0[2];
  } else {
    x[0] = cfg.i_d_initial;
    x[1] = cfg.i_q_initial;
  }
  x[kIdHat] = cfg.observer.i_d_initial;
  x[kIqHat] = cfg.observer.i_q_initial;
  x[kU0Hat] = std::isnan(cfg.observer.u0_initial) ? cfg.u0_initial : cfg.observer.u0_initial;
  x[kU0Load] = cfg.u0_initial;

  StState obs_st;
  LoadObserverState lo = make_load_observer(cfg.params.r_nominal, cfg.u0_initial);
  StState st_d, st_q;
  PIState pi;
  pi.gains = tune_pi(cfg.params, cfg.u0_ref, cfg.pi);

  ReferenceSet refs;
  refs.u0_ref = cfg.u0_ref;
  ReferenceDerivativeFilter iq_filter(cfg.ref_derivative_tau);
  if (cfg.controller == ControllerKind::st) {
    refs = reference_currents(p.e_mag, p.r, lo.r_hat, cfg.u0_ref);
    iq_filter.reset(refs.i_q_ref);
  } else if (cfg.controller == ControllerKind::fixed) {
    try {
      refs = reference_currents(p.e_mag, p.r, cfg.params.r_nominal, cfg.u0_ref);
    } catch (const ReferenceError&) {
      refs = ReferenceSet{0.0, 0.0, 0.0, cfg.u0_ref};
    }
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise_dist(0.0, cfg.noise_std > 0.0 ? cfg.noise_std : 1.0);

  DqControl u_cmd{};
  SwitchVector sw;
  ObserverInjection inj;
  double mu_load = 0.0;
  StState lo_st_next;
  StState st_d_next, st_q_next;
  bool saturated = false;
  bool held = false;

  PfAccumulator pf_acc;
  pf_acc.restart(0.0, 0.0, p.omega);
  std::array<double, 3> pf_last{std::nan(""), std::nan(""), std::nan("")};
  double pf_total_last = std::nan("");

  std::size_t next_event = 0;
  std::uint32_t pending_flags = 0;
  long last_unreached = -1;

  for (long k = 0; k <= n_steps; ++k) {
    const double t = double(k) * dt;

    // events
    bool omega_changed = false;
    while (next_event < cfg.events.size() && event_due(cfg.events[next_event].time, t)) {
      if (cfg.events[next_event].field == EventField::omega) omega_changed = true;
      ++next_event;
      pending_flags |= flags::event;
    }
    p = apply_events(cfg, t, cfg.params);
    if (omega_changed) pf_acc.restart(t, x[kTheta], p.omega);

    const double noise = cfg.noise_std > 0.0 ? noise_dist(rng) : 0.0;
    const double u0_meas = x[kU0] + noise;
    const double theta = x[kTheta];

    if (ideal) {
      refs = reference_currents(p.e_mag, p.r, p.r_load, cfg.u0_ref);
      x[0] = refs.i_d_ref;
      x[1] = refs.i_q_ref;
      x[kIdHat] = x[0];
      x[kIqHat] = x[1];
      x[kU0Hat] = x[kU0];
      x[kU0Load] = x[kU0];
      lo.r_hat = p.r_load;
    }

    Vec3 i_abc;
    Vec2 i_dq;
    if (switched) {
      i_abc = {x[0], x[1], x[2]};
      i_dq = park_transform(theta, i_abc);
    } else {
      i_dq = {x[0], x[1]};
      i_abc = inverse_park(theta, i_dq);
    }

    // observers: injections held over the step
    if (observers) {
      inj = observer_injection(ObserverState{x[kIdHat], x[kIqHat], x[kU0Hat], obs_st, cfg.observer.kappa,
                                             cfg.observer.e3_threshold},
                               u0_meas, u_cmd, cfg.observer.gains, dt);
      if (!(u0_meas > 0.0)) throw DivergenceError(t, "measured U0 is not positive");
      LoadObserverState lo_view = lo;
      lo_view.u0_hat = x[kU0Load];
      const LoadObserverInjection li = load_observer_injection(lo_view, u0_meas, cfg.load_observer.gains, dt);
      mu_load = li.mu;
      lo_st_next = li.st;
      update_load_estimate(lo, u0_meas, li.mu, p, cfg.load_observer, dt);
      if (lo.held) {
        pending_flags |= flags::load_estimate_held;
        ++trace.diag.load_hold_steps;
      }
      if (std::abs(inj.e3) >= reach_threshold) last_unreached = k;
      if (std::abs(inj.e3) <= cfg.observer.e3_threshold) pending_flags |= flags::observer_sliding;
    }

    // references and control
    if (k % hold_steps == 0) {
      const double hdt = double(hold_steps) * dt;
      saturated = false;
      held = false;
      switch (cfg.controller) {
        case ControllerKind::st: {
          try {
            const ReferenceSet r = reference_currents(p.e_mag, p.r, lo.r_hat, cfg.u0_ref);
            refs.i_d_ref = r.i_d_ref;
            refs.i_q_ref = r.i_q_ref;
          } catch (const ReferenceError& e) {
            throw ReferenceError(t, e.detail());
          }
          refs.i_q_ref_dot = iq_filter.update(refs.i_q_ref, hdt);
          const SlidingVars s = sliding_variables(refs, x[kIdHat], x[kIqHat]);
          const StControlOutput out =
              st_control(s, st_d, st_q, refs, p, u0_meas, cfg.st_d, cfg.st_q, hdt, u_cmd, cfg.u0_floor);
          u_cmd = out.u;
          st_d_next = out.st_d;
          st_q_next = out.st_q;
          saturated = out.saturated;
          held = out.held;
          break;
        }
        case ControllerKind::pi: {
          const PiOutput out = pi_control(pi, u0_meas, x[kIdHat], x[kIqHat], refs, p, hdt, cfg.u0_floor);
          held = !(u0_meas >= cfg.u0_floor);
          u_cmd = out.u;
          pi = out.state;
          refs.i_d_ref = 0.0;
          refs.i_q_ref = out.i_q_cmd;
          saturated = out.saturated;
          break;
        }
        case ControllerKind::ideal:
          u_cmd = steady_state_control(refs, p, x[kU0]);
          break;
        case ControllerKind::fixed:
          u_cmd = cfg.fixed_u;
          break;
      }
      if (saturated) {
        ++trace.diag.saturation_steps;
        trace.diag.last_saturation_time = t;
        pending_flags |= flags::saturated;
      }
      if (held) pending_flags |= flags::control_held;
    }
    if (observers) inj.k = correction_gains(inj.e3, u_cmd, cfg.observer.kappa, cfg.observer.e3_threshold);
    if (switched) sw = pwm_modulate(u_cmd, theta, (double(k % carrier_steps) + 0.5) / double(carrier_steps));

    // power factor, one window per source period
    PfWindowResult win;
    if (pf_acc.push(t, theta, i_abc, source_voltages(p.e_mag, theta), dt, win)) {
      for (int j = 0; j < 3; ++j) pf_last[j] = win.report.phases[j].pf;
      pf_total_last = win.report.pf_total;
      if (win.report.reversed) pending_flags |= flags::pf_reversed;
      trace.pf_windows.push_back(win);
    }

    if (k % cfg.decimate == 0) {
      TraceRecord rec;
      rec.t = t;
      rec.i_abc = i_abc;
      rec.i_d = i_dq[0];
      rec.i_q = i_dq[1];
      rec.u0 = x[kU0];
      rec.i_d_hat = x[kIdHat];
      rec.i_q_hat = x[kIqHat];
      rec.u0_hat = x[kU0Hat];
      rec.r_hat = lo.r_hat;
      rec.i_d_ref = refs.i_d_ref;
      rec.i_q_ref = refs.i_q_ref;
      rec.u_d = u_cmd.u_d;
      rec.u_q = u_cmd.u_q;
      rec.pf = pf_last;
      rec.pf_total = pf_total_last;
      rec.flags = pending_flags;
      rec.theta = theta;
      rec.e3 = observers ? inj.e3 : 0.0;
      rec.s_d_hat = refs.i_d_ref - x[kIdHat];
      rec.s_q_hat = refs.i_q_ref - x[kIqHat];
      rec.r_load = p.r_load;
      rec.omega = p.omega;
      if (switched) rec.switches = {std::int8_t(sw[0]), std::int8_t(sw[1]), std::int8_t(sw[2])};
      trace.records.push_back(rec);
      pending_flags = 0;
    }

    if (k == n_steps) break;

    // plant and observers advance jointly so the observers see U0 at every stage
    ConverterParams p_obs = p;
    if (cfg.observer.load_model == LoadModel::estimated) p_obs.r_load = lo.r_hat;
    const Vec3 sw_vec = sw.as_vector();

    auto rhs = [&](double, const State& s) {
      State d{};
      const double u0_stage = s[kU0];
      const double u0m = u0_stage + noise;
      DqControl u_plant = u_cmd;
      DqControl u_obs = u_cmd;
      if (ideal) {
        u_plant = steady_state_control(refs, p, u0_stage);
        const DqState pd = plant_derivatives_dq({s[0], s[1], u0_stage}, u_plant, p);
        d[kU0] = pd.u0;
      } else if (switched) {
        const PlantState pd = plant_derivatives_abc(PlantState{{s[0], s[1], s[2]}, u0_stage}, sw_vec, p, s[kTheta]);
        d[0] = pd.i_abc[0];
        d[1] = pd.i_abc[1];
        d[2] = pd.i_abc[2];
        d[kU0] = pd.u0;
        const Vec2 udq = park_transform(s[kTheta], sw_vec);
        u_obs = {udq[0], udq[1]};
      } else {
        const DqState pd = plant_derivatives_dq({s[0], s[1], u0_stage}, u_plant, p);
        d[0] = pd.i_d;
        d[1] = pd.i_q;
        d[kU0] = pd.u0;
      }
      d[kTheta] = p.omega;
      if (observers) {
        const DqState od = observer_derivatives({s[kIdHat], s[kIqHat], s[kU0Hat]}, u0m, u_obs, p_obs, inj);
        d[kIdHat] = od.i_d;
        d[kIqHat] = od.i_q;
        d[kU0Hat] = od.u0;
        d[kU0Load] = load_observer_derivative(u0m, s[kIdHat], s[kIqHat], u_obs, p, lo.r_nominal, mu_load);
      }
      return d;
    };

    x = integrate_step(x, t, dt, rhs);
    if (!all_finite(x)) throw DivergenceError(t + dt, "non-finite plant or estimator state");
    if (out_of_bounds(x)) throw DivergenceError(t + dt, "plant or estimator state exceeds 1e9");

    if (observers) {
      obs_st = inj.st;
      lo.st = lo_st_next;
    }
    if (cfg.controller == ControllerKind::st && k % hold_steps == 0 && !held) {
      st_d = st_d_next;
      st_q = st_q_next;
    }
  }

  trace.diag.steps = n_steps;
  if (observers) {
    if (last_unreached < 0)
      trace.diag.reach_time = 0.0;
    else if (last_unreached < n_steps)
      trace.diag.reach_time = double(last_unreached + 1) * dt;
  }
  trace.diag.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return trace;
}

}  // namespace stsmc
