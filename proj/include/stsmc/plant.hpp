#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace stsmc {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// Physical constants of the three-phase boost rectifier with resistive load.
struct ConverterParams {
  double r = 0.0;          ///< parasitic phase resistance [Ohm]
  double l_ind = 0.0;      ///< phase inductance [H]
  double c_cap = 0.0;      ///< output capacitance [F]
  double r_load = 0.0;     ///< actual load resistance [Ohm]
  double r_nominal = 0.0;  ///< nominal load R0 [Ohm]
  double e_mag = 0.0;      ///< source amplitude E [V]
  double omega = 0.0;      ///< source angular frequency [rad/s]

  /// Throws ConfigError unless every field is finite and strictly positive.
  void validate() const;

  /// Largest admissible output voltage E*sqrt(3*R/(8r)) for load `r_load_value`.
  double max_output_voltage(double r_load_value) const;
  double max_output_voltage() const { return max_output_voltage(r_load); }
};

/// Phase-frame plant state.
struct PlantState {
  Vec3 i_abc{};
  double u0 = 0.0;
};

/// Rotating-frame plant state x = (i_d, i_q, U0).
struct DqState {
  double i_d = 0.0;
  double i_q = 0.0;
  double u0 = 0.0;
};

/// Continuous control in the rotating frame.
struct DqControl {
  double u_d = 0.0;
  double u_q = 0.0;

  double norm() const;
};

/// Discrete switch commands, each exactly -1 or +1.
class SwitchVector {
 public:
  SwitchVector() = default;
  /// Throws InputError unless every entry is -1 or +1.
  SwitchVector(int u1, int u2, int u3);

  int operator[](std::size_t i) const { return u_[i]; }
  Vec3 as_vector() const { return {double(u_[0]), double(u_[1]), double(u_[2])}; }

  /// All eight combinations, in binary order of (u1,u2,u3) with -1 < +1.
  static std::array<SwitchVector, 8> all();

  friend bool operator==(const SwitchVector&, const SwitchVector&) = default;

 private:
  std::array<std::int8_t, 3> u_{-1, -1, -1};
};

/// Balanced source set E*[sin(t), sin(t-2pi/3), sin(t+2pi/3)].
Vec3 source_voltages(double e_mag, double theta);

/// Amplitude-invariant rotating-frame transform.
///
/// Rows are (2/3)*[-cos(wt - k*2pi/3)] and (2/3)*[sin(wt - k*2pi/3)], k = 0,1,2.
/// With this d-axis orientation the source maps to (0, E) and the rotating-frame
/// dynamics below follow exactly from the phase-frame model.
Vec2 park_transform(double omega_t, const Vec3& abc);

/// (3/2) T^T dq, the right inverse of park_transform.
Vec3 inverse_park(double omega_t, const Vec2& dq);

/// Phase-frame right-hand side. `u` is a switch vector or a vector of
/// averaged duties in [-1,1]; `theta` is the source phase.
PlantState plant_derivatives_abc(const PlantState& state, const Vec3& u, const ConverterParams& p,
                                 double theta);
PlantState plant_derivatives_abc(const PlantState& state, const SwitchVector& u,
                                 const ConverterParams& p, double theta);

/// Rotating-frame right-hand side:
///   di_d/dt = -(r/L) i_d + w i_q - U0/(2L) u_d
///   di_q/dt = -(r/L) i_q + E/L - w i_d - U0/(2L) u_q
///   dU0/dt  = -U0/(R_L C) + 3 (i_d u_d + i_q u_q)/(4C)
DqState plant_derivatives_dq(const DqState& state, const DqControl& u, const ConverterParams& p);

/// Observability matrix of (i_d, i_q, U0) from y = U0 for constant controls.
Eigen::Matrix3d observability_matrix(const DqControl& u, const ConverterParams& p);

/// Numerical rank: singular values above rel_tol * sigma_max.
int numerical_rank(const Eigen::Matrix3d& m, double rel_tol = 1e-9);

/// Spectral norm of the transform matrix at omega_t.
double park_matrix_norm(double omega_t);

}  // namespace stsmc
