#include "stsmc/observer.hpp"

#include <cmath>

#include "stsmc/error.hpp"
#include "stsmc/integrator.hpp"

namespace stsmc {

CorrectionGains correction_gains(double e3, const DqControl& u, double kappa, double threshold) {
  if (std::abs(e3) <= threshold) return {kappa * u.u_d, kappa * u.u_q};
  return {};
}

ObserverInjection observer_injection(const ObserverState& obs, double u0_meas, const DqControl& u,
                                     const StGains& gains, double dt) {
  ObserverInjection inj;
  inj.e3 = u0_meas - obs.u0_hat;
  const StOutput st = sta_step(obs.st, inj.e3, gains, dt);
  inj.mu = st.mu;
  inj.st = st.state;
  inj.k = correction_gains(inj.e3, u, obs.kappa, obs.e3_threshold);
  return inj;
}

DqState observer_derivatives(const DqState& x, double u0_meas, const DqControl& u,
                             const ConverterParams& p, const ObserverInjection& inj) {
  const double rl = p.r / p.l_ind;
  const double k = u0_meas / (2.0 * p.l_ind);
  return {
      -rl * x.i_d + p.omega * x.i_q - k * u.u_d + inj.k.k1 * inj.mu,
      -rl * x.i_q - p.omega * x.i_d - k * u.u_q + p.e_mag / p.l_ind + inj.k.k2 * inj.mu,
      -u0_meas / (p.r_load * p.c_cap) + 3.0 / (4.0 * p.c_cap) * (x.i_d * u.u_d + x.i_q * u.u_q) + inj.mu,
  };
}

ObserverState observer_step(const ObserverState& obs, double u0_meas, const DqControl& u,
                            const ConverterParams& p, const StGains& gains, double dt) {
  if (!validate_gains(gains)) throw ConfigError("observer gains violate alpha > F, lambda^2 > alpha");
  if (!(dt > 0.0)) throw ConfigError("observer_step: dt must be > 0");

  const ObserverInjection inj = observer_injection(obs, u0_meas, u, gains, dt);
  using S = std::array<double, 3>;
  const S x0{obs.i_d_hat, obs.i_q_hat, obs.u0_hat};
  const S x1 = integrate_step(x0, 0.0, dt, [&](double, const S& x) {
    const DqState d = observer_derivatives({x[0], x[1], x[2]}, u0_meas, u, p, inj);
    return S{d.i_d, d.i_q, d.u0};
  });

  ObserverState next = obs;
  next.i_d_hat = x1[0];
  next.i_q_hat = x1[1];
  next.u0_hat = x1[2];
  next.st = inj.st;
  return next;
}

Vec3 error_dynamics(const Vec3& e, const DqControl& u, double k1, double k2, double mu,
                    const ConverterParams& p) {
  const double rl = p.r / p.l_ind;
  return {
      -rl * e[0] + p.omega * e[1] - k1 * mu,
      -p.omega * e[0] - rl * e[1] - k2 * mu,
      3.0 / (4.0 * p.c_cap) * (u.u_d * e[0] + u.u_q * e[1]) - mu,
  };
}

LyapunovValue lyapunov_v(double e1, double e2, const ConverterParams& p) {
  const double n2 = e1 * e1 + e2 * e2;
  return {p.l_ind / (2.0 * p.r) * n2, -n2};
}

LoadObserverState make_load_observer(double r_nominal, double u0_initial) {
  LoadObserverState lo;
  lo.u0_hat = u0_initial;
  lo.r_nominal = r_nominal;
  lo.r_hat = r_nominal;
  return lo;
}

LoadObserverInjection load_observer_injection(const LoadObserverState& lo, double u0_meas,
                                              const StGains& gains, double dt) {
  LoadObserverInjection inj;
  inj.e = u0_meas - lo.u0_hat;
  const StOutput st = sta_step(lo.st, inj.e, gains, dt);
  inj.mu = st.mu;
  inj.st = st.state;
  return inj;
}

double load_observer_derivative(double u0_meas, double i_d_hat, double i_q_hat, const DqControl& u,
                                const ConverterParams& p, double r_nominal, double mu) {
  return -u0_meas / (r_nominal * p.c_cap) + 3.0 / (4.0 * p.c_cap) * (i_d_hat * u.u_d + i_q_hat * u.u_q) + mu;
}

bool estimate_load(double r_nominal, double u0, double c_cap, double mu, double den_eps, double& out) {
  const double den = u0 - r_nominal * c_cap * mu;
  if (!(den >= den_eps)) return false;
  out = r_nominal * u0 / den;
  return true;
}

void update_load_estimate(LoadObserverState& lo, double u0_meas, double mu, const ConverterParams& p,
                          const LoadObserverConfig& cfg, double dt) {
  double m = mu;
  if (cfg.filter_tau > 0.0) {
    lo.mu_filtered += dt / (cfg.filter_tau + dt) * (mu - lo.mu_filtered);
    m = lo.mu_filtered;
  }
  double r = 0.0;
  lo.held = !estimate_load(lo.r_nominal, u0_meas, p.c_cap, m, cfg.den_eps, r);
  if (!lo.held) lo.r_hat = r;
}

LoadObserverState load_observer_step(const LoadObserverState& lo, double u0_meas, double i_d_hat,
                                     double i_q_hat, const DqControl& u, const ConverterParams& p,
                                     const LoadObserverConfig& cfg, double dt) {
  if (!(u0_meas > 0.0)) throw InputError("load_observer_step: measured U0 must be > 0");
  const LoadObserverInjection inj = load_observer_injection(lo, u0_meas, cfg.gains, dt);

  LoadObserverState next = lo;
  update_load_estimate(next, u0_meas, inj.mu, p, cfg, dt);
  // the derivative is constant over the step once inputs are held
  next.u0_hat += dt * load_observer_derivative(u0_meas, i_d_hat, i_q_hat, u, p, lo.r_nominal, inj.mu);
  next.st = inj.st;
  return next;
}

}  // namespace stsmc
