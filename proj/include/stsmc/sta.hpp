#pragma once

namespace stsmc {

/// Gains of one super-twisting instance. `f_bound` is the assumed bound on the
/// derivative of the matched perturbation; it only enters gain validation.
struct StGains {
  double lambda = 0.0;
  double alpha = 0.0;
  double f_bound = 0.0;
};

/// Integral term alpha * integral(sign(e)).
struct StState {
  double z = 0.0;
};

struct StOutput {
  StState state;
  double mu = 0.0;
};

/// sign with sign(0) == 0.
constexpr double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// One super-twisting update:
///   z'  = z + alpha * sign(e) * dt
///   mu  = lambda * sqrt(|e|) * sign(e) + z'
/// Throws InputError for non-finite e/dt or dt < 0.
StOutput sta_step(StState state, double e, const StGains& gains, double dt);

/// True iff alpha > F and lambda^2 > alpha (and all gains positive/finite).
bool validate_gains(const StGains& gains) noexcept;

}  // namespace stsmc
