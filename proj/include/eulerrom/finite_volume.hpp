#pragma once

// Structured-grid finite-volume discretization of the Euler equations:
// component-wise WENO5 reconstruction of conserved variables, Rusanov face
// fluxes, and the RK4 / Crank-Nicolson time discretizations.
//
// Field layout (cell-major): a field over a mesh with N cells is a vector of
// length (Dim + 2) * N with value(c, q) = values[c * (Dim + 2) + q]. Cells are
// numbered with the x_1 index fastest: c = i + nx * j.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eulerrom/euler.hpp"

namespace eulerrom {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class BoundaryKind { Periodic, ZeroGradient };

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kGhostLayers = 3;
inline constexpr int kMinCellsPerAxis = 11;

template <int Dim>
struct Mesh {
  std::array<int, Dim> cells{};
  std::array<double, Dim> lower{};
  std::array<double, Dim> upper{};
  std::array<BoundaryKind, Dim> boundary{};

  void validate() const {
    for (int a = 0; a < Dim; ++a) {
      if (cells[a] < kMinCellsPerAxis) {
        throw std::invalid_argument("Mesh: need at least " + std::to_string(kMinCellsPerAxis) +
                                    " cells per axis");
      }
      if (!(upper[a] > lower[a])) throw std::invalid_argument("Mesh: empty domain");
    }
  }

  double width(int axis) const { return (upper[axis] - lower[axis]) / cells[axis]; }

  int num_cells() const {
    int n = 1;
    for (int a = 0; a < Dim; ++a) n *= cells[a];
    return n;
  }

  Eigen::Index field_size() const { return Eigen::Index(num_cells()) * (Dim + 2); }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < Dim; ++a) v *= width(a);
    return v;
  }

  double center(int axis, int i) const { return lower[axis] + (i + 0.5) * width(axis); }

  int stride(int axis) const {
    int s = 1;
    for (int a = 0; a < axis; ++a) s *= cells[a];
    return s;
  }
};

template <int Dim>
Mesh<Dim> uniform_mesh(int n, double lo, double hi, BoundaryKind bc) {
  Mesh<Dim> m;
  m.cells.fill(n);
  m.lower.fill(lo);
  m.upper.fill(hi);
  m.boundary.fill(bc);
  m.validate();
  return m;
}

template <int Dim>
StateVector<Dim> cell_state(const Vector& field, int cell) {
  return field.template segment<Dim + 2>(Eigen::Index(cell) * (Dim + 2));
}

struct WenoConfig {
  double epsilon = 1e-6;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("WenoConfig: epsilon must be positive");
  }
};

struct WenoWeights {
  std::array<double, 3> omega{};
  double value = 0.0;
};

/// Jiang-Shu WENO5 value at the right face of v[2]; stencil ordered
/// upwind-to-downwind. Also returns the nonlinear weights.
inline WenoWeights weno5_weights(const std::array<double, 5>& v, double epsilon) {
  constexpr double c13 = 13.0 / 12.0;
  const double b0 = c13 * (v[0] - 2 * v[1] + v[2]) * (v[0] - 2 * v[1] + v[2]) +
                    0.25 * (v[0] - 4 * v[1] + 3 * v[2]) * (v[0] - 4 * v[1] + 3 * v[2]);
  const double b1 = c13 * (v[1] - 2 * v[2] + v[3]) * (v[1] - 2 * v[2] + v[3]) +
                    0.25 * (v[1] - v[3]) * (v[1] - v[3]);
  const double b2 = c13 * (v[2] - 2 * v[3] + v[4]) * (v[2] - 2 * v[3] + v[4]) +
                    0.25 * (3 * v[2] - 4 * v[3] + v[4]) * (3 * v[2] - 4 * v[3] + v[4]);
  const double a0 = 0.1 / ((epsilon + b0) * (epsilon + b0));
  const double a1 = 0.6 / ((epsilon + b1) * (epsilon + b1));
  const double a2 = 0.3 / ((epsilon + b2) * (epsilon + b2));
  const double sum = a0 + a1 + a2;
  WenoWeights w;
  w.omega = {a0 / sum, a1 / sum, a2 / sum};
  const double q0 = (2 * v[0] - 7 * v[1] + 11 * v[2]) / 6.0;
  const double q1 = (-v[1] + 5 * v[2] + 2 * v[3]) / 6.0;
  const double q2 = (2 * v[2] + 5 * v[3] - v[4]) / 6.0;
  w.value = w.omega[0] * q0 + w.omega[1] * q1 + w.omega[2] * q2;
  return w;
}

/// Face value and its gradient with respect to the five stencil values.
inline double weno5_gradient(const std::array<double, 5>& v, double epsilon, std::array<double, 5>& grad) {
  using Row = std::array<double, 5>;
  constexpr double c13 = 13.0 / 12.0;
  static constexpr std::array<Row, 3> ca = {{{1, -2, 1, 0, 0}, {0, 1, -2, 1, 0}, {0, 0, 1, -2, 1}}};
  static constexpr std::array<Row, 3> cb = {{{1, -4, 3, 0, 0}, {0, 1, 0, -1, 0}, {0, 0, 3, -4, 1}}};
  static constexpr std::array<Row, 3> cq = {{{2 / 6.0, -7 / 6.0, 11 / 6.0, 0, 0},
                                             {0, -1 / 6.0, 5 / 6.0, 2 / 6.0, 0},
                                             {0, 0, 2 / 6.0, 5 / 6.0, -1 / 6.0}}};
  static constexpr std::array<double, 3> linear = {0.1, 0.6, 0.3};
  auto dot = [&v](const Row& c) {
    double s = 0.0;
    for (int k = 0; k < 5; ++k) s += c[k] * v[k];
    return s;
  };
  std::array<double, 3> a{}, b{}, beta{}, alpha{}, q{};
  double sum = 0.0, num = 0.0;
  for (int r = 0; r < 3; ++r) {
    a[r] = dot(ca[r]);
    b[r] = dot(cb[r]);
    beta[r] = c13 * a[r] * a[r] + 0.25 * b[r] * b[r];
    alpha[r] = linear[r] / ((epsilon + beta[r]) * (epsilon + beta[r]));
    q[r] = dot(cq[r]);
    sum += alpha[r];
    num += alpha[r] * q[r];
  }
  const double value = num / sum;
  // d value = sum_r omega_r dq_r + sum_r d alpha_r (q_r - value) / sum
  grad.fill(0.0);
  for (int r = 0; r < 3; ++r) {
    const double omega = alpha[r] / sum;
    const double dalpha_dbeta = -2.0 * alpha[r] / (epsilon + beta[r]);
    const double w = dalpha_dbeta * (q[r] - value) / sum;
    for (int k = 0; k < 5; ++k) {
      grad[k] += omega * cq[r][k] + w * (2.0 * c13 * a[r] * ca[r][k] + 0.5 * b[r] * cb[r][k]);
    }
  }
  return value;
}

inline double weno5_reconstruct(const std::array<double, 5>& v, const WenoConfig& cfg) {
  return weno5_weights(v, cfg.epsilon).value;
}

/// Rusanov (local Lax-Friedrichs) flux across a face normal to `axis`.
template <int Dim>
StateVector<Dim> numerical_flux(const StateVector<Dim>& left, const StateVector<Dim>& right,
                                int axis, const GasModel& gas) {
  const double lambda = std::max(max_wave_speed<Dim>(left, axis, gas),
                                 max_wave_speed<Dim>(right, axis, gas));
  return 0.5 * (analytic_flux<Dim>(left, axis, gas) + analytic_flux<Dim>(right, axis, gas)) -
         0.5 * lambda * (right - left);
}

/// Spatial operator f(U) = -div F(U) on a fixed mesh.
///
/// `component_scale` rescales the WENO regularizer per conserved component
/// (epsilon_q = epsilon * scale_q^2) so that a problem expressed in other units
/// is discretized by exactly the rescaled scheme.
template <int Dim>
class FiniteVolume {
 public:
  static constexpr int kComp = Dim + 2;

  FiniteVolume(Mesh<Dim> mesh, GasModel gas, WenoConfig weno,
               StateVector<Dim> component_scale = StateVector<Dim>::Ones())
      : mesh_(std::move(mesh)), gas_(gas), weno_(weno) {
    mesh_.validate();
    gas_.validate();
    weno_.validate();
    for (int q = 0; q < kComp; ++q) {
      epsilon_[q] = weno_.epsilon * component_scale[q] * component_scale[q];
    }
  }

  const Mesh<Dim>& mesh() const { return mesh_; }
  const GasModel& gas() const { return gas_; }
  const WenoConfig& weno() const { return weno_; }

  /// Writes f(u) into `rate`. Returns false if any face state is inadmissible
  /// or any rate entry is non-finite; `rate` is then unspecified.
  [[nodiscard]] bool evaluate(const Vector& u, Vector& rate) const {
    const Eigen::Index n = mesh_.field_size();
    if (u.size() != n) throw std::invalid_argument("FiniteVolume: field size mismatch");
    rate.setZero(n);
    try {
      for (int axis = 0; axis < Dim; ++axis) sweep_axis(u, axis, rate);
    } catch (const InadmissibleStateError&) {
      return false;
    }
    return rate.allFinite();
  }

  /// Tangent J_f(u) du for every column of `du`. At the kinks of the Rusanov
  /// speed (the max and |u_n|) the branch chosen by evaluate() is
  /// differentiated. Returns false where evaluate() would.
  [[nodiscard]] bool tangent(const Vector& u, const Matrix& du, Matrix& out) const {
    const Eigen::Index n = mesh_.field_size();
    if (u.size() != n || du.rows() != n) throw std::invalid_argument("FiniteVolume: field size mismatch");
    out.setZero(n, du.cols());
    try {
      for (int axis = 0; axis < Dim; ++axis) sweep_axis_tangent(u, du, axis, out);
    } catch (const InadmissibleStateError&) {
      return false;
    }
    return out.allFinite();
  }

  /// Throwing form of evaluate().
  Vector operator()(const Vector& u) const {
    Vector rate;
    if (!evaluate(u, rate)) throw NonFiniteError("semi-discrete rhs produced a non-finite value");
    return rate;
  }

 private:
  int wrap(int i, int n, BoundaryKind bc) const {
    if (bc == BoundaryKind::Periodic) return ((i % n) + n) % n;
    return std::clamp(i, 0, n - 1);
  }

  void sweep_axis(const Vector& u, int axis, Vector& rate) const {
    const int n = mesh_.cells[axis];
    const int stride = mesh_.stride(axis);
    const int lines = mesh_.num_cells() / n;
    const BoundaryKind bc = mesh_.boundary[axis];
    const double inv_dx = 1.0 / mesh_.width(axis);

    std::vector<StateVector<Dim>> line(n + 2 * kGhostLayers);
    std::vector<StateVector<Dim>> face_flux(n + 1);
    std::array<double, 5> sl{}, sr{};

    for (int l = 0; l < lines; ++l) {
      const int base = line_base(l, axis);
      for (int i = -kGhostLayers; i < n + kGhostLayers; ++i) {
        line[i + kGhostLayers] = cell_state<Dim>(u, base + wrap(i, n, bc) * stride);
      }
      // face f sits between cells f - 1 and f; padded index of cell f - 1 is f + 2
      for (int f = 0; f <= n; ++f) {
        StateVector<Dim> left, right;
        for (int q = 0; q < kComp; ++q) {
          for (int k = 0; k < 5; ++k) {
            sl[k] = line[f + k][q];
            sr[k] = line[f + 5 - k][q];
          }
          left[q] = weno5_weights(sl, epsilon_[q]).value;
          right[q] = weno5_weights(sr, epsilon_[q]).value;
        }
        face_flux[f] = numerical_flux<Dim>(left, right, axis, gas_);
      }
      for (int i = 0; i < n; ++i) {
        const Eigen::Index c = Eigen::Index(base + i * stride) * kComp;
        rate.template segment<kComp>(c) -= (face_flux[i + 1] - face_flux[i]) * inv_dx;
      }
    }
  }

  // first cell of line l, decomposing l over the axes other than `axis`
  int line_base(int l, int axis) const {
    int base = 0;
    int rem = l;
    for (int a = 0; a < Dim; ++a) {
      if (a == axis) continue;
      base += (rem % mesh_.cells[a]) * mesh_.stride(a);
      rem /= mesh_.cells[a];
    }
    return base;
  }

  void sweep_axis_tangent(const Vector& u, const Matrix& du, int axis, Matrix& out) const {
    using Block = Eigen::Matrix<double, kComp, Eigen::Dynamic>;
    const int n = mesh_.cells[axis];
    const int stride = mesh_.stride(axis);
    const int lines = mesh_.num_cells() / n;
    const BoundaryKind bc = mesh_.boundary[axis];
    const double inv_dx = 1.0 / mesh_.width(axis);
    const Eigen::Index k = du.cols();

    std::vector<StateVector<Dim>> line(n + 2 * kGhostLayers);
    std::vector<Block> dline(n + 2 * kGhostLayers, Block(kComp, k));
    std::vector<Block> dflux(n + 1, Block(kComp, k));
    std::array<double, 5> sl{}, sr{}, gl{}, gr{};
    Block dl(kComp, k), dr(kComp, k);

    for (int l = 0; l < lines; ++l) {
      const int base = line_base(l, axis);
      for (int i = -kGhostLayers; i < n + kGhostLayers; ++i) {
        const int c = base + wrap(i, n, bc) * stride;
        line[i + kGhostLayers] = cell_state<Dim>(u, c);
        dline[i + kGhostLayers] = du.middleRows(Eigen::Index(c) * kComp, kComp);
      }
      for (int f = 0; f <= n; ++f) {
        StateVector<Dim> left, right;
        for (int q = 0; q < kComp; ++q) {
          for (int s = 0; s < 5; ++s) {
            sl[s] = line[f + s][q];
            sr[s] = line[f + 5 - s][q];
          }
          left[q] = weno5_gradient(sl, epsilon_[q], gl);
          right[q] = weno5_gradient(sr, epsilon_[q], gr);
          dl.row(q).setZero();
          dr.row(q).setZero();
          for (int s = 0; s < 5; ++s) {
            dl.row(q) += gl[s] * dline[f + s].row(q);
            dr.row(q) += gr[s] * dline[f + 5 - s].row(q);
          }
        }
        const double sl_speed = max_wave_speed<Dim>(left, axis, gas_);
        const double sr_speed = max_wave_speed<Dim>(right, axis, gas_);
        const bool left_wins = sl_speed >= sr_speed;  // std::max keeps the first on ties
        const double lambda = left_wins ? sl_speed : sr_speed;
        const StateVector<Dim> dspeed = left_wins ? max_wave_speed_gradient<Dim>(left, axis, gas_)
                                                  : max_wave_speed_gradient<Dim>(right, axis, gas_);
        const Eigen::Matrix<double, 1, Eigen::Dynamic> dlambda =
            dspeed.transpose() * (left_wins ? dl : dr);
        dflux[f].noalias() = 0.5 * (flux_jacobian<Dim>(left, axis, gas_) * dl +
                                    flux_jacobian<Dim>(right, axis, gas_) * dr);
        dflux[f].noalias() -= 0.5 * (right - left) * dlambda;
        dflux[f] -= 0.5 * lambda * (dr - dl);
      }
      for (int i = 0; i < n; ++i) {
        const Eigen::Index c = Eigen::Index(base + i * stride) * kComp;
        out.middleRows(c, kComp) -= (dflux[i + 1] - dflux[i]) * inv_dx;
      }
    }
  }

  Mesh<Dim> mesh_;
  GasModel gas_;
  WenoConfig weno_;
  std::array<double, kComp> epsilon_{};
};

/// Classical four-stage RK4:
/// k1 = f(u), k2 = f(u + dt/2 k1), k3 = f(u + dt/2 k2), k4 = f(u + dt k3),
/// u_new = u + dt/6 (k1 + 2 k2 + 2 k3 + k4).
template <class Vec, class Rhs>
Vec rk4_step(const Vec& u, double dt, Rhs&& rhs) {
  const Vec k1 = rhs(u);
  const Vec k2 = rhs(Vec(u + 0.5 * dt * k1));
  const Vec k3 = rhs(Vec(u + 0.5 * dt * k2));
  const Vec k4 = rhs(Vec(u + dt * k3));
  return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// (u_new - u_old) / dt - (f_new + f_old) / 2 from precomputed rates.
inline Vector crank_nicolson_residual(const Vector& u_new, const Vector& u_old,
                                      const Vector& f_new, const Vector& f_old, double dt) {
  return (u_new - u_old) / dt - 0.5 * (f_new + f_old);
}

template <int Dim>
Vector crank_nicolson_residual(const Vector& u_new, const Vector& u_old, double dt,
                               const FiniteVolume<Dim>& fv) {
  return crank_nicolson_residual(u_new, u_old, fv(u_new), fv(u_old), dt);
}

}  // namespace eulerrom
