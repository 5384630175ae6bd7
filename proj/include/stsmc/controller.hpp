#pragma once

#include "stsmc/plant.hpp"
#include "stsmc/sta.hpp"

namespace stsmc {

/// Unity-power-factor operating point.
struct ReferenceSet {
  double i_d_ref = 0.0;
  double i_q_ref = 0.0;
  double i_q_ref_dot = 0.0;
  double u0_ref = 0.0;
};

/// i_d* = 0 and the minimal-loss root
///   i_q* = E/(2r) - 1/2 sqrt(E^2/r^2 - 8 U0*^2 / (3 R_L r)).
/// Throws ReferenceError (time 0) if U0* exceeds E sqrt(3 R_L / (8 r)).
ReferenceSet reference_currents(double e_mag, double r, double r_load_hat, double u0_ref);

/// (3/2)(i_q E - r(i_d^2 + i_q^2)) - U0*^2/R_L for a reference set.
double power_balance_residual(const ReferenceSet& refs, double e_mag, double r, double r_load);

/// First-order filtered derivative s/(tau s + 1), discretized with backward Euler.
class ReferenceDerivativeFilter {
 public:
  explicit ReferenceDerivativeFilter(double tau = 1e-3) : tau_(tau) {}

  void reset(double value) { y_ = value; }
  /// Feeds a new sample and returns the filtered derivative.
  double update(double value, double dt);

 private:
  double tau_;
  double y_ = 0.0;
};

struct SlidingVars {
  double s_d_hat = 0.0;
  double s_q_hat = 0.0;
};

SlidingVars sliding_variables(const ReferenceSet& refs, double i_d_hat, double i_q_hat);

/// Control that holds the currents at the references for a given U0
/// (fast current equations set to zero).
DqControl steady_state_control(const ReferenceSet& refs, const ConverterParams& p, double u0);

struct StControlOutput {
  DqControl u;
  StState st_d;
  StState st_q;
  bool saturated = false;
  bool held = false;
};

/// Output-feedback super-twisting current law
///   u_d = (2L/U0)((r/L) s_d - w s_q - mu(s_d) - F_d),  F_d = -w i_q*
///   u_q = (2L/U0)(w s_d + (r/L) s_q - mu(s_q) - F_q),  F_q = di_q*/dt + (r/L) i_q* - E/L
/// with each component clamped to [-1, 1]. Below `u0_floor` the previous
/// control is held and the STA states are left untouched.
StControlOutput st_control(const SlidingVars& s, StState st_d, StState st_q, const ReferenceSet& refs,
                           const ConverterParams& p, double u0_meas, const StGains& gains_d,
                           const StGains& gains_q, double dt, const DqControl& previous = {},
                           double u0_floor = 1.0);

/// Symmetric triangle in [-1, 1]: -1 at phase 0, +1 at phase 0.5.
double triangle_carrier(double phase);

/// Phase modulation references inverse_park(u), clamped to [-1, 1].
Vec3 modulation_references(const DqControl& u, double omega_t);

/// Carrier comparison: +1 where the phase reference is >= the carrier.
SwitchVector pwm_modulate(const DqControl& u, double omega_t, double carrier_phase);

// ---------------------------------------------------------------------------
// PI baseline

struct PiTuning {
  double current_bandwidth_hz = 500.0;
  double voltage_bandwidth_hz = 50.0;
  double voltage_damping = 0.8;
  double i_q_max = 200.0;
};

struct PiGains {
  double kp_v = 0.0;  ///< [A/V]
  double ki_v = 0.0;  ///< [A/(V s)]
  double kp_i = 0.0;  ///< [V/A]
  double ki_i = 0.0;  ///< [V/(A s)]
  double i_q_max = 0.0;
};

/// Current loops: kp = L wc, ki = r wc, which cancels the R-L pole and leaves
/// a first-order loop of bandwidth wc. Voltage loop: pole placement on the
/// linearized capacitor model at the nominal load,
///   C dU0/dt = (3E / (2 U0*)) i_q - (2/R0) C U0.
PiGains tune_pi(const ConverterParams& nominal, double u0_ref, const PiTuning& tuning);

struct PIState {
  PiGains gains;
  double v_int = 0.0;
  double d_int = 0.0;
  double q_int = 0.0;
  DqControl last{};
};

struct PiOutput {
  DqControl u;
  PIState state;
  double i_q_cmd = 0.0;
  bool saturated = false;
};

/// Cascade PI: outer voltage loop commands i_q (i_d = 0), inner current loops
/// with w L cross-coupling and E feed-forward. Integrators freeze while their
/// output saturates.
PiOutput pi_control(const PIState& pi, double u0_meas, double i_d_hat, double i_q_hat,
                    const ReferenceSet& refs, const ConverterParams& p, double dt, double u0_floor = 1.0);

}  // namespace stsmc
