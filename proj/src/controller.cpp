#include "stsmc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stsmc/error.hpp"

namespace stsmc {

namespace {

double clamp_unit(double v, bool& saturated) {
  if (v > 1.0) {
    saturated = true;
    return 1.0;
  }
  if (v < -1.0) {
    saturated = true;
    return -1.0;
  }
  return v;
}

}  // namespace

ReferenceSet reference_currents(double e_mag, double r, double r_load_hat, double u0_ref) {
  if (!(r_load_hat > 0.0) || !std::isfinite(r_load_hat))
    throw ReferenceError(0.0, "load estimate must be positive and finite");
  const double disc = e_mag * e_mag / (r * r) - 8.0 * u0_ref * u0_ref / (3.0 * r_load_hat * r);
  if (disc < 0.0) {
    const double bound = e_mag * std::sqrt(3.0 * r_load_hat / (8.0 * r));
    throw ReferenceError(0.0, "U0* = " + std::to_string(u0_ref) + " V exceeds admissible " +
                                  std::to_string(bound) + " V for R_L = " + std::to_string(r_load_hat));
  }
  ReferenceSet refs;
  refs.i_d_ref = 0.0;
  refs.i_q_ref = e_mag / (2.0 * r) - 0.5 * std::sqrt(disc);
  refs.u0_ref = u0_ref;
  return refs;
}

double power_balance_residual(const ReferenceSet& refs, double e_mag, double r, double r_load) {
  const double losses = r * (refs.i_d_ref * refs.i_d_ref + refs.i_q_ref * refs.i_q_ref);
  return 1.5 * (refs.i_q_ref * e_mag - losses) - refs.u0_ref * refs.u0_ref / r_load;
}

double ReferenceDerivativeFilter::update(double value, double dt) {
  y_ = (y_ + dt / tau_ * value) / (1.0 + dt / tau_);
  return (value - y_) / tau_;
}

SlidingVars sliding_variables(const ReferenceSet& refs, double i_d_hat, double i_q_hat) {
  return {refs.i_d_ref - i_d_hat, refs.i_q_ref - i_q_hat};
}

DqControl steady_state_control(const ReferenceSet& refs, const ConverterParams& p, double u0) {
  const double k = 2.0 * p.l_ind / u0;
  const double rl = p.r / p.l_ind;
  return {k * (-rl * refs.i_d_ref + p.omega * refs.i_q_ref),
          k * (-rl * refs.i_q_ref - p.omega * refs.i_d_ref + p.e_mag / p.l_ind)};
}

StControlOutput st_control(const SlidingVars& s, StState st_d, StState st_q, const ReferenceSet& refs,
                           const ConverterParams& p, double u0_meas, const StGains& gains_d,
                           const StGains& gains_q, double dt, const DqControl& previous, double u0_floor) {
  StControlOutput out;
  if (!(u0_meas >= u0_floor)) {
    out.u = previous;
    out.st_d = st_d;
    out.st_q = st_q;
    out.held = true;
    return out;
  }

  const StOutput mu_d = sta_step(st_d, s.s_d_hat, gains_d, dt);
  const StOutput mu_q = sta_step(st_q, s.s_q_hat, gains_q, dt);

  const double rl = p.r / p.l_ind;
  const double f_d = -p.omega * refs.i_q_ref;
  const double f_q = refs.i_q_ref_dot + rl * refs.i_q_ref - p.e_mag / p.l_ind;
  const double k = 2.0 * p.l_ind / u0_meas;

  const double u_d = k * (rl * s.s_d_hat - p.omega * s.s_q_hat - mu_d.mu - f_d);
  const double u_q = k * (p.omega * s.s_d_hat + rl * s.s_q_hat - mu_q.mu - f_q);

  out.u = {clamp_unit(u_d, out.saturated), clamp_unit(u_q, out.saturated)};
  out.st_d = mu_d.state;
  out.st_q = mu_q.state;
  return out;
}

double triangle_carrier(double phase) {
  phase -= std::floor(phase);
  return phase < 0.5 ? -1.0 + 4.0 * phase : 3.0 - 4.0 * phase;
}

Vec3 modulation_references(const DqControl& u, double omega_t) {
  Vec3 m = inverse_park(omega_t, {u.u_d, u.u_q});
  for (double& v : m) v = std::clamp(v, -1.0, 1.0);
  return m;
}

SwitchVector pwm_modulate(const DqControl& u, double omega_t, double carrier_phase) {
  const Vec3 m = modulation_references(u, omega_t);
  const double c = triangle_carrier(carrier_phase);
  return SwitchVector(m[0] >= c ? 1 : -1, m[1] >= c ? 1 : -1, m[2] >= c ? 1 : -1);
}

PiGains tune_pi(const ConverterParams& nominal, double u0_ref, const PiTuning& tuning) {
  const double wc = 2.0 * std::numbers::pi * tuning.current_bandwidth_hz;
  const double wv = 2.0 * std::numbers::pi * tuning.voltage_bandwidth_hz;
  const double a = 2.0 / (nominal.r_nominal * nominal.c_cap);
  const double b = 3.0 * nominal.e_mag / (2.0 * u0_ref * nominal.c_cap);

  PiGains g;
  g.kp_i = nominal.l_ind * wc;
  g.ki_i = nominal.r * wc;
  // s^2 + (a + b kp) s + b ki = s^2 + 2 zeta wv s + wv^2
  g.kp_v = std::max(0.0, (2.0 * tuning.voltage_damping * wv - a) / b);
  g.ki_v = wv * wv / b;
  g.i_q_max = tuning.i_q_max;
  return g;
}

PiOutput pi_control(const PIState& pi, double u0_meas, double i_d_hat, double i_q_hat,
                    const ReferenceSet& refs, const ConverterParams& p, double dt, double u0_floor) {
  if (!(dt > 0.0)) throw InputError("pi_control: dt must be > 0");
  PiOutput out;
  out.state = pi;
  if (!(u0_meas >= u0_floor)) {
    out.u = pi.last;
    return out;
  }

  const PiGains& g = pi.gains;
  const double ev = refs.u0_ref - u0_meas;
  const double icmd_raw = g.kp_v * ev + pi.v_int;
  const double icmd = std::clamp(icmd_raw, 0.0, g.i_q_max);
  if (icmd == icmd_raw) out.state.v_int += g.ki_v * ev * dt;

  const double eq = icmd - i_q_hat;
  const double ed = 0.0 - i_d_hat;
  const double vq = g.kp_i * eq + pi.q_int;
  const double vd = g.kp_i * ed + pi.d_int;

  const double wl = p.omega * p.l_ind;
  const double k = 2.0 / u0_meas;
  const double uq_raw = k * (p.e_mag - wl * i_d_hat - vq);
  const double ud_raw = k * (wl * i_q_hat - vd);

  bool sat_q = false;
  bool sat_d = false;
  out.u.u_q = clamp_unit(uq_raw, sat_q);
  out.u.u_d = clamp_unit(ud_raw, sat_d);
  if (!sat_q) out.state.q_int += g.ki_i * eq * dt;
  if (!sat_d) out.state.d_int += g.ki_i * ed * dt;

  out.saturated = sat_q || sat_d;
  out.i_q_cmd = icmd;
  out.state.last = out.u;
  return out;
}

}  // namespace stsmc
