#include "stsmc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stsmc/error.hpp"
#include "stsmc/kernels.hpp"

namespace stsmc {

void check_window(const SignalWindow& w) {
  if (w.samples.empty()) throw InputError("signal window is empty");
  if (!(w.dt > 0.0) || !std::isfinite(w.dt)) throw InputError("signal window dt must be > 0");
  if (w.fundamental_freq > 0.0 && w.samples.size() > 1) {
    const double period = 1.0 / w.fundamental_freq;
    const double cycles = w.span() / period;
    const double whole = std::round(cycles);
    if (whole < 1.0 || std::abs(cycles - whole) * period > w.dt * (1.0 + 1e-9))
      throw InputError("signal window must span an integer number of fundamental periods");
  }
}

double rms(const SignalWindow& w) {
  check_window(w);
  const std::size_t n = w.samples.size();
  if (n == 1) return std::abs(w.samples[0]);
  const double mean_sq = kernels::trapz_sumsq(w.samples.data(), n) / double(n - 1);
  return std::sqrt(std::max(0.0, mean_sq));
}

Fundamental fundamental_component(const SignalWindow& w) {
  check_window(w);
  if (!(w.fundamental_freq > 0.0)) throw InputError("fundamental_component needs a fundamental frequency");
  const std::size_t n = w.samples.size();
  if (n < 2) throw InputError("fundamental_component needs at least two samples");

  thread_local std::vector<double> s;
  thread_local std::vector<double> c;
  s.resize(n);
  c.resize(n);
  const double wdt = 2.0 * std::numbers::pi * w.fundamental_freq * w.dt;
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = std::sin(wdt * double(k));
    c[k] = std::cos(wdt * double(k));
  }
  const double scale = 2.0 / double(n - 1);
  const double a = scale * kernels::trapz_dot(w.samples.data(), s.data(), n);
  const double b = scale * kernels::trapz_dot(w.samples.data(), c.data(), n);
  return {std::hypot(a, b), std::atan2(b, a)};
}

PhasePowerFactor phase_power_factor(const SignalWindow& current, const SignalWindow& voltage) {
  if (current.samples.size() != voltage.samples.size() || current.dt != voltage.dt ||
      current.fundamental_freq != voltage.fundamental_freq)
    throw InputError("current and voltage windows must share span and fundamental");
  const double i_rms = rms(current);
  if (!(i_rms > 0.0)) throw PowerFactorError(current.t0, "power factor undefined for zero-RMS current");

  const Fundamental fi = fundamental_component(current);
  const Fundamental fv = fundamental_component(voltage);
  PhasePowerFactor out;
  out.pf_h = std::min(1.0, fi.amplitude / std::numbers::sqrt2 / i_rms);
  out.pf_d = std::cos(fi.phase - fv.phase);
  out.pf = out.pf_h * out.pf_d;
  return out;
}

double total_power_factor(double pf1, double pf2, double pf3) { return pf1 * pf2 * pf3; }

PowerFactorReport power_factor_report(const std::array<SignalWindow, 3>& currents,
                                      const std::array<SignalWindow, 3>& voltages) {
  PowerFactorReport rep;
  for (std::size_t k = 0; k < 3; ++k) {
    rep.phases[k] = phase_power_factor(currents[k], voltages[k]);
    if (rep.phases[k].pf_d < 0.0) rep.reversed = true;
  }
  rep.pf_total = total_power_factor(rep.phases[0].pf, rep.phases[1].pf, rep.phases[2].pf);
  return rep;
}

double thd_from_pf_h(double pf_h) {
  if (!(pf_h > 0.0) || pf_h > 1.0) throw InputError("pf_h must lie in (0, 1]");
  return std::sqrt(std::max(0.0, 1.0 / (pf_h * pf_h) - 1.0));
}

}  // namespace stsmc
