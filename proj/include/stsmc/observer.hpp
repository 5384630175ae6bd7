#pragma once

#include "stsmc/plant.hpp"
#include "stsmc/sta.hpp"

namespace stsmc {

/// Super-twisting current observer driven only by the output-voltage error
/// e3 = U0 - U0_hat.
struct ObserverState {
  double i_d_hat = 0.0;
  double i_q_hat = 0.0;
  double u0_hat = 0.0;
  StState st;
  double kappa = 1.0;
  double e3_threshold = 1e-3;  ///< |e3| at or below this counts as sliding [V]
};

struct CorrectionGains {
  double k1 = 0.0;
  double k2 = 0.0;
};

/// k1 = kappa*u_d, k2 = kappa*u_q while |e3| <= threshold, else both zero.
CorrectionGains correction_gains(double e3, const DqControl& u, double kappa, double threshold);

/// Quantities held constant over one integration step.
struct ObserverInjection {
  double e3 = 0.0;
  double mu = 0.0;
  CorrectionGains k;
  StState st;  ///< STA state after this step
};

/// Computes e3 and advances the STA for one step.
ObserverInjection observer_injection(const ObserverState& obs, double u0_meas, const DqControl& u,
                                     const StGains& gains, double dt);

/// Right-hand side of the observer for the estimates (i_d_hat, i_q_hat, U0_hat).
/// The measured U0 (not the estimate) enters the input and load terms.
DqState observer_derivatives(const DqState& estimate, double u0_meas, const DqControl& u,
                             const ConverterParams& p, const ObserverInjection& inj);

/// Advances the observer by one step with u0_meas and u held over the step.
/// Throws ConfigError for invalid gains or dt <= 0.
ObserverState observer_step(const ObserverState& obs, double u0_meas, const DqControl& u,
                            const ConverterParams& p, const StGains& gains, double dt);

/// Observation-error dynamics for (e1, e2, e3); test oracle.
Vec3 error_dynamics(const Vec3& e, const DqControl& u, double k1, double k2, double mu,
                    const ConverterParams& p);

struct LyapunovValue {
  double v = 0.0;
  double v_dot_bound = 0.0;
};

/// V = (L/2r)(e1^2 + e2^2), with the decrease bound -(e1^2 + e2^2).
LyapunovValue lyapunov_v(double e1, double e2, const ConverterParams& p);

/// Super-twisting load-resistance observer built on the nominal load R0.
struct LoadObserverState {
  double u0_hat = 0.0;
  StState st;
  double r_nominal = 0.0;
  double r_hat = 0.0;
  double mu_filtered = 0.0;  ///< only used when filter_tau > 0
  bool held = false;         ///< last update kept the previous estimate
};

struct LoadObserverConfig {
  StGains gains;
  double den_eps = 1e-3;    ///< minimum admissible U0 - R0*C*mu [V]
  double filter_tau = 0.0;  ///< optional smoothing of mu before the estimate; 0 = off
};

LoadObserverState make_load_observer(double r_nominal, double u0_initial);

struct LoadObserverInjection {
  double e = 0.0;
  double mu = 0.0;
  StState st;
};

LoadObserverInjection load_observer_injection(const LoadObserverState& lo, double u0_meas,
                                              const StGains& gains, double dt);

/// dU0_hat/dt = -U0/(R0 C) + 3/(4C)(i_d_hat u_d + i_q_hat u_q) + mu.
double load_observer_derivative(double u0_meas, double i_d_hat, double i_q_hat, const DqControl& u,
                                const ConverterParams& p, double r_nominal, double mu);

/// R0*U0 / (U0 - R0*C*mu). Returns false (and leaves `out` untouched) when
/// the denominator is below den_eps.
bool estimate_load(double r_nominal, double u0, double c_cap, double mu, double den_eps, double& out);

/// Applies the injection to the estimate (and the optional mu filter).
void update_load_estimate(LoadObserverState& lo, double u0_meas, double mu, const ConverterParams& p,
                          const LoadObserverConfig& cfg, double dt);

/// Advances the load observer by one step with inputs held over the step.
LoadObserverState load_observer_step(const LoadObserverState& lo, double u0_meas, double i_d_hat,
                                     double i_q_hat, const DqControl& u, const ConverterParams& p,
                                     const LoadObserverConfig& cfg, double dt);

}  // namespace stsmc
