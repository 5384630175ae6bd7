#include "stsmc/plant.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "stsmc/error.hpp"

namespace stsmc {

namespace {

constexpr double kTwoThirdsPi = 2.0 * std::numbers::pi / 3.0;

Eigen::Matrix<double, 2, 3> park_matrix(double wt) {
  Eigen::Matrix<double, 2, 3> t;
  for (int k = 0; k < 3; ++k) {
    const double a = wt - k * kTwoThirdsPi;
    t(0, k) = -(2.0 / 3.0) * std::cos(a);
    t(1, k) = (2.0 / 3.0) * std::sin(a);
  }
  return t;
}

}  // namespace

void ConverterParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"r", r},           {"l_ind", l_ind},   {"c_cap", c_cap}, {"r_load", r_load},
      {"r_nominal", r_nominal}, {"e_mag", e_mag}, {"omega", omega}};
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value) || value <= 0.0)
      throw ConfigError(std::string("params.") + name, 0, "must be finite and > 0");
  }
}

double ConverterParams::max_output_voltage(double r_load_value) const {
  return e_mag * std::sqrt(3.0 * r_load_value / (8.0 * r));
}

double DqControl::norm() const { return std::hypot(u_d, u_q); }

SwitchVector::SwitchVector(int u1, int u2, int u3) {
  for (int v : {u1, u2, u3})
    if (v != -1 && v != 1) throw InputError("SwitchVector: entries must be -1 or +1");
  u_ = {std::int8_t(u1), std::int8_t(u2), std::int8_t(u3)};
}

std::array<SwitchVector, 8> SwitchVector::all() {
  std::array<SwitchVector, 8> out;
  for (int m = 0; m < 8; ++m) {
    auto bit = [m](int b) { return (m >> b) & 1 ? 1 : -1; };
    out[m] = SwitchVector(bit(2), bit(1), bit(0));
  }
  return out;
}

Vec3 source_voltages(double e_mag, double theta) {
  return {e_mag * std::sin(theta), e_mag * std::sin(theta - kTwoThirdsPi),
          e_mag * std::sin(theta + kTwoThirdsPi)};
}

Vec2 park_transform(double omega_t, const Vec3& abc) {
  const Eigen::Vector2d dq = park_matrix(omega_t) * Eigen::Vector3d(abc[0], abc[1], abc[2]);
  return {dq[0], dq[1]};
}

Vec3 inverse_park(double omega_t, const Vec2& dq) {
  const Eigen::Vector3d abc = 1.5 * park_matrix(omega_t).transpose() * Eigen::Vector2d(dq[0], dq[1]);
  return {abc[0], abc[1], abc[2]};
}

PlantState plant_derivatives_abc(const PlantState& s, const Vec3& u, const ConverterParams& p,
                                 double theta) {
  const Vec3 ug = source_voltages(p.e_mag, theta);
  const double k = s.u0 / (6.0 * p.l_ind);
  PlantState d;
  d.i_abc[0] = -p.r / p.l_ind * s.i_abc[0] - k * (2.0 * u[0] - u[1] - u[2]) + ug[0] / p.l_ind;
  d.i_abc[1] = -p.r / p.l_ind * s.i_abc[1] - k * (2.0 * u[1] - u[0] - u[2]) + ug[1] / p.l_ind;
  d.i_abc[2] = -p.r / p.l_ind * s.i_abc[2] - k * (2.0 * u[2] - u[0] - u[1]) + ug[2] / p.l_ind;
  d.u0 = -s.u0 / (p.r_load * p.c_cap) +
         (s.i_abc[0] * u[0] + s.i_abc[1] * u[1] + s.i_abc[2] * u[2]) / (2.0 * p.c_cap);
  return d;
}

PlantState plant_derivatives_abc(const PlantState& s, const SwitchVector& u, const ConverterParams& p,
                                 double theta) {
  return plant_derivatives_abc(s, u.as_vector(), p, theta);
}

DqState plant_derivatives_dq(const DqState& s, const DqControl& u, const ConverterParams& p) {
  const double rl = p.r / p.l_ind;
  const double k = s.u0 / (2.0 * p.l_ind);
  return {
      -rl * s.i_d + p.omega * s.i_q - k * u.u_d,
      -rl * s.i_q + p.e_mag / p.l_ind - p.omega * s.i_d - k * u.u_q,
      -s.u0 / (p.r_load * p.c_cap) + 3.0 * (s.i_d * u.u_d + s.i_q * u.u_q) / (4.0 * p.c_cap),
  };
}

Eigen::Matrix3d observability_matrix(const DqControl& u, const ConverterParams& p) {
  const double c = p.c_cap;
  const double rc = p.r_load * c;
  const double g = 3.0 / (4.0 * c);
  const double rho = g * (p.r / p.l_ind + 1.0 / rc);
  const double n2 = u.u_d * u.u_d + u.u_q * u.u_q;

  Eigen::Matrix3d o;
  o << 0.0, 0.0, 1.0,
       g * u.u_d, g * u.u_q, -1.0 / rc,
       -rho * u.u_d - g * p.omega * u.u_q, g * p.omega * u.u_d - rho * u.u_q,
       -3.0 * n2 / (8.0 * p.l_ind * c) + 1.0 / (rc * rc);
  return o;
}

int numerical_rank(const Eigen::Matrix3d& m, double rel_tol) {
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3d>(m).singularValues();
  if (sv[0] == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (sv[i] > rel_tol * sv[0]) ++rank;
  return rank;
}

double park_matrix_norm(double omega_t) {
  const Eigen::Matrix<double, 2, 3> t = park_matrix(omega_t);
  return Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>>(t).singularValues()[0];
}

}  // namespace stsmc
