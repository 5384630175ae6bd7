#include "stsmc/sta.hpp"

#include <cmath>

#include "stsmc/error.hpp"

namespace stsmc {

StOutput sta_step(StState state, double e, const StGains& gains, double dt) {
  if (!std::isfinite(e) || !std::isfinite(dt)) throw InputError("sta_step: non-finite input");
  if (dt < 0.0) throw InputError("sta_step: negative dt");

  const double s = sign(e);
  StOutput out;
  out.state.z = state.z + gains.alpha * s * dt;
  out.mu = gains.lambda * std::sqrt(std::abs(e)) * s + out.state.z;
  return out;
}

bool validate_gains(const StGains& g) noexcept {
  if (!std::isfinite(g.lambda) || !std::isfinite(g.alpha) || !std::isfinite(g.f_bound)) return false;
  if (g.lambda <= 0.0 || g.alpha <= 0.0 || g.f_bound < 0.0) return false;
  return g.alpha > g.f_bound && g.lambda * g.lambda > g.alpha;
}

}  // namespace stsmc
