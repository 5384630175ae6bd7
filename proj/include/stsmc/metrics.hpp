#pragma once

#include <array>
#include <vector>

namespace stsmc {

/// Uniformly sampled signal, endpoint inclusive: n samples span (n-1)*dt.
struct SignalWindow {
  std::vector<double> samples;
  double dt = 0.0;
  double fundamental_freq = 0.0;  ///< [Hz]; 0 = unknown (rms only)
  double t0 = 0.0;                ///< start time, reported in errors

  double span() const { return samples.size() < 2 ? 0.0 : double(samples.size() - 1) * dt; }
};

/// Throws InputError if the window is empty, dt <= 0, or (when a fundamental
/// is given) it does not span an integer number >= 1 of periods within one sample.
void check_window(const SignalWindow& w);

/// Trapezoidal sqrt((1/T) * integral x^2). A single sample returns |x0|.
double rms(const SignalWindow& w);

struct Fundamental {
  double amplitude = 0.0;
  double phase = 0.0;  ///< [rad], x ~ amplitude * sin(2 pi f t + phase)
};

/// Single-bin projection onto sin/cos at the fundamental frequency, with t
/// measured from the first sample.
Fundamental fundamental_component(const SignalWindow& w);

struct PhasePowerFactor {
  double pf_h = 0.0;  ///< fundamental RMS / total RMS, in [0, 1]
  double pf_d = 0.0;  ///< cos(phase_i - phase_v)
  double pf = 0.0;    ///< pf_h * pf_d
};

/// Throws PowerFactorError (at w.t0) when the current has zero RMS.
PhasePowerFactor phase_power_factor(const SignalWindow& current, const SignalWindow& voltage);

double total_power_factor(double pf1, double pf2, double pf3);

struct PowerFactorReport {
  std::array<PhasePowerFactor, 3> phases{};
  double pf_total = 0.0;
  bool reversed = false;  ///< some pf_d < 0
};

PowerFactorReport power_factor_report(const std::array<SignalWindow, 3>& currents,
                                      const std::array<SignalWindow, 3>& voltages);

/// sqrt(1/pf_h^2 - 1).
double thd_from_pf_h(double pf_h);

}  // namespace stsmc
