#pragma once

// Pointwise thermodynamics for the compressible Euler equations in one and two
// space dimensions: equation of state, conserved <-> entropy variable maps,
// analytic fluxes and the symmetric entropy Jacobian.
//
// State vectors have Dim + 2 components ordered (rho, rho*u_1, [rho*u_2], rho*E).
// Entropy vectors use the same slot layout: (V_1, rho*u_1/p, [rho*u_2/p], -rho/p).

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace eulerrom {

template <int Dim>
inline constexpr int kNumComponents = Dim + 2;

template <int Dim>
using StateVector = Eigen::Matrix<double, Dim + 2, 1>;

template <int Dim>
using StateMatrix = Eigen::Matrix<double, Dim + 2, Dim + 2>;

class InadmissibleStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Calorically perfect gas.
///
/// `reference_density` and `reference_pressure` fix the additive constant of
/// the entropy s = ln(p / p_ref) - gamma * ln(rho / rho_ref) and the absolute
/// floor used to reject inadmissible states. With both set to one the raw
/// s = ln(p) - gamma * ln(rho) is recovered. Setting them to (rho_inf,
/// rho_inf * a_inf^2) makes the entropy variables of a rescaled problem an exact
/// linear image of the non-dimensional ones.
struct GasModel {
  double gamma = 1.4;
  double reference_density = 1.0;
  double reference_pressure = 1.0;

  static constexpr double kAdmissibilityFloor = 1e-13;

  void validate() const {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
      throw std::invalid_argument("GasModel: gamma must be > 1");
    }
    if (!(reference_density > 0.0) || !(reference_pressure > 0.0)) {
      throw std::invalid_argument("GasModel: reference scales must be positive");
    }
  }
};

template <int Dim>
double kinetic_energy_density(const StateVector<Dim>& u) {
  double m2 = 0.0;
  for (int k = 1; k <= Dim; ++k) m2 += u[k] * u[k];
  return 0.5 * m2 / u[0];
}

/// p = (gamma - 1) (rho E - rho |u|^2 / 2). May be <= 0; admissibility is the
/// caller's decision.
template <int Dim>
double pressure(const StateVector<Dim>& u, const GasModel& gas) {
  if (!u.allFinite()) throw std::invalid_argument("pressure: non-finite state");
  if (!(u[0] > 0.0)) throw InadmissibleStateError("pressure: density must be positive");
  return (gas.gamma - 1.0) * (u[Dim + 1] - kinetic_energy_density<Dim>(u));
}

template <int Dim>
bool is_admissible(const StateVector<Dim>& u, const GasModel& gas) {
  if (!u.allFinite()) return false;
  if (!(u[0] > GasModel::kAdmissibilityFloor * gas.reference_density)) return false;
  const double p = (gas.gamma - 1.0) * (u[Dim + 1] - kinetic_energy_density<Dim>(u));
  return p > GasModel::kAdmissibilityFloor * gas.reference_pressure;
}

namespace detail {

template <int Dim>
double checked_pressure(const StateVector<Dim>& u, const GasModel& gas, const char* who) {
  if (!is_admissible<Dim>(u, gas)) {
    throw InadmissibleStateError(std::string(who) + ": inadmissible state");
  }
  return (gas.gamma - 1.0) * (u[Dim + 1] - kinetic_energy_density<Dim>(u));
}

}  // namespace detail

template <int Dim>
double entropy(double rho, double p, const GasModel& gas) {
  return std::log(p / gas.reference_pressure) -
         gas.gamma * std::log(rho / gas.reference_density);
}

template <int Dim>
StateVector<Dim> conserved_to_entropy(const StateVector<Dim>& u, const GasModel& gas) {
  const double p = detail::checked_pressure<Dim>(u, gas, "conserved_to_entropy");
  const double g = gas.gamma;
  const double s = entropy<Dim>(u[0], p, gas);
  StateVector<Dim> v;
  v[0] = -s / (g - 1.0) + (g + 1.0) / (g - 1.0) - u[Dim + 1] / p;
  for (int k = 1; k <= Dim; ++k) v[k] = u[k] / p;
  v[Dim + 1] = -u[0] / p;
  return v;
}

template <int Dim>
StateVector<Dim> entropy_to_conserved(const StateVector<Dim>& v, const GasModel& gas) {
  if (!v.allFinite()) throw InadmissibleStateError("entropy_to_conserved: non-finite input");
  const double beta = -v[Dim + 1];  // rho / p
  if (!(beta > 0.0)) {
    throw InadmissibleStateError("entropy_to_conserved: last entropy variable must be negative");
  }
  const double g = gas.gamma;
  double u2 = 0.0;
  for (int k = 1; k <= Dim; ++k) u2 += (v[k] / beta) * (v[k] / beta);
  // V_1 = (gamma - s) / (gamma - 1) - beta |u|^2 / 2
  const double s = g - (g - 1.0) * (v[0] + 0.5 * beta * u2);
  const double log_rho_ratio =
      (s - std::log(gas.reference_density / (beta * gas.reference_pressure))) / (1.0 - g);
  const double rho = gas.reference_density * std::exp(log_rho_ratio);
  const double p = rho / beta;
  StateVector<Dim> u;
  u[0] = rho;
  for (int k = 1; k <= Dim; ++k) u[k] = rho * v[k] / beta;
  u[Dim + 1] = p / (g - 1.0) + 0.5 * rho * u2;
  if (!u.allFinite() || !(rho > 0.0)) {
    throw InadmissibleStateError("entropy_to_conserved: state overflow");
  }
  return u;
}

/// A = dU/dV in closed form (symmetric positive definite).
template <int Dim>
StateMatrix<Dim> entropy_jacobian(const StateVector<Dim>& u, const GasModel& gas) {
  const double p = detail::checked_pressure<Dim>(u, gas, "entropy_jacobian");
  constexpr int e = Dim + 1;
  const double rho = u[0];
  const double enthalpy = (u[e] + p) / rho;
  const double a2 = gas.gamma * p / rho;
  StateMatrix<Dim> a;
  a(0, 0) = rho;
  for (int k = 1; k <= Dim; ++k) {
    a(0, k) = u[k];
    for (int l = 1; l <= Dim; ++l) a(k, l) = u[k] * u[l] / rho + (k == l ? p : 0.0);
    a(k, e) = u[k] * enthalpy;
  }
  a(0, e) = u[e];
  a(e, e) = rho * enthalpy * enthalpy - a2 * p / (gas.gamma - 1.0);
  for (int i = 0; i < Dim + 2; ++i) {
    for (int j = 0; j < i; ++j) a(i, j) = a(j, i);
  }
  return a;
}

/// A^{-1} = dV/dU in closed form, differentiated directly from the U -> V map
/// (not by inverting A).
template <int Dim>
StateMatrix<Dim> entropy_jacobian_inverse(const StateVector<Dim>& u, const GasModel& gas) {
  const double p = detail::checked_pressure<Dim>(u, gas, "entropy_jacobian_inverse");
  constexpr int e = Dim + 1;
  const double g1 = gas.gamma - 1.0;
  const double rho = u[0];
  StateVector<Dim> dp;
  double v2 = 0.0;
  for (int k = 1; k <= Dim; ++k) v2 += (u[k] / rho) * (u[k] / rho);
  dp[0] = 0.5 * g1 * v2;
  for (int k = 1; k <= Dim; ++k) dp[k] = -g1 * u[k] / rho;
  dp[e] = g1;
  StateMatrix<Dim> j;
  // V_1 = -s / (gamma - 1) + const - rho E / p, with ds = dp / p - gamma drho / rho
  j.row(0) = (u[e] / (p * p) - 1.0 / (g1 * p)) * dp.transpose();
  j(0, 0) += gas.gamma / (g1 * rho);
  j(0, e) -= 1.0 / p;
  for (int k = 1; k <= Dim; ++k) {
    j.row(k) = (-u[k] / (p * p)) * dp.transpose();
    j(k, k) += 1.0 / p;
  }
  j.row(e) = (rho / (p * p)) * dp.transpose();
  j(e, 0) -= 1.0 / p;
  return 0.5 * (j + j.transpose());
}

template <int Dim>
void check_axis(int axis) {
  if (axis < 0 || axis >= Dim) throw std::out_of_range("flux direction out of range");
}

/// Inviscid flux along `axis` (0-based).
template <int Dim>
StateVector<Dim> analytic_flux(const StateVector<Dim>& u, int axis, const GasModel& gas) {
  check_axis<Dim>(axis);
  const double p = detail::checked_pressure<Dim>(u, gas, "analytic_flux");
  const double vn = u[1 + axis] / u[0];
  StateVector<Dim> f;
  f[0] = u[1 + axis];
  for (int k = 1; k <= Dim; ++k) f[k] = u[k] * vn;
  f[1 + axis] += p;
  f[Dim + 1] = vn * (u[Dim + 1] + p);
  return f;
}

/// |u_axis| + a.
template <int Dim>
double max_wave_speed(const StateVector<Dim>& u, int axis, const GasModel& gas) {
  check_axis<Dim>(axis);
  const double p = detail::checked_pressure<Dim>(u, gas, "max_wave_speed");
  return std::abs(u[1 + axis] / u[0]) + std::sqrt(gas.gamma * p / u[0]);
}

/// dF_axis/dU.
template <int Dim>
StateMatrix<Dim> flux_jacobian(const StateVector<Dim>& u, int axis, const GasModel& gas) {
  check_axis<Dim>(axis);
  const double p = detail::checked_pressure<Dim>(u, gas, "flux_jacobian");
  constexpr int e = Dim + 1;
  const int n = 1 + axis;
  const double g1 = gas.gamma - 1.0;
  const double rho = u[0];
  Eigen::Matrix<double, Dim, 1> vel;
  for (int k = 0; k < Dim; ++k) vel[k] = u[1 + k] / rho;
  const double vn = vel[axis];
  StateVector<Dim> dp;  // dp/dU
  dp[0] = 0.5 * g1 * vel.squaredNorm();
  for (int k = 1; k <= Dim; ++k) dp[k] = -g1 * vel[k - 1];
  dp[e] = g1;
  const double h = (u[e] + p) / rho;

  StateMatrix<Dim> j = StateMatrix<Dim>::Zero();
  j(0, n) = 1.0;
  for (int b = 1; b <= Dim; ++b) {
    j(b, 0) = -vn * vel[b - 1];
    j(b, n) += vel[b - 1];
    j(b, b) += vn;
  }
  j.row(n) += dp.transpose();
  j(e, 0) = -vn * h;
  j(e, n) = h;
  j(e, e) = vn;
  j.row(e) += vn * dp.transpose();
  return j;
}

/// Gradient of max_wave_speed with respect to U; d|u_n| is taken as sign(u_n).
template <int Dim>
StateVector<Dim> max_wave_speed_gradient(const StateVector<Dim>& u, int axis, const GasModel& gas) {
  check_axis<Dim>(axis);
  const double p = detail::checked_pressure<Dim>(u, gas, "max_wave_speed_gradient");
  constexpr int e = Dim + 1;
  const double g = gas.gamma;
  const double rho = u[0];
  const double vn = u[1 + axis] / rho;
  const double c = std::sqrt(g * p / rho);
  StateVector<Dim> dp;
  double v2 = 0.0;
  for (int k = 1; k <= Dim; ++k) v2 += (u[k] / rho) * (u[k] / rho);
  dp[0] = 0.5 * (g - 1.0) * v2;
  for (int k = 1; k <= Dim; ++k) dp[k] = -(g - 1.0) * u[k] / rho;
  dp[e] = g - 1.0;
  // c^2 = g p / rho: dc = g / (2 c rho) (dp - p / rho drho)
  StateVector<Dim> grad = (g / (2.0 * c * rho)) * dp;
  grad[0] -= g * p / (2.0 * c * rho * rho);
  const double sgn = vn > 0.0 ? 1.0 : (vn < 0.0 ? -1.0 : 0.0);
  grad[0] -= sgn * vn / rho;
  grad[1 + axis] += sgn / rho;
  return grad;
}

/// Conserved state from primitives (rho, velocity, p).
template <int Dim>
StateVector<Dim> from_primitive(double rho, const Eigen::Matrix<double, Dim, 1>& vel, double p,
                                const GasModel& gas) {
  StateVector<Dim> u;
  u[0] = rho;
  for (int k = 0; k < Dim; ++k) u[1 + k] = rho * vel[k];
  u[Dim + 1] = p / (gas.gamma - 1.0) + 0.5 * rho * vel.squaredNorm();
  return u;
}

}  // namespace eulerrom
