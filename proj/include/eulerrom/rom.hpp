#pragma once

// Projection ROMs on a POD trial space.
//
// Galerkin (advanced with RK4):
//   conserved:  (Phi^T W Phi) dc/dt = Phi^T W f(Phi c)
//   entropy:    (Phi^T W A(V~) Phi) dc/dt = Phi^T W f(U(V~)),  V~ = Phi c
// Windowed least squares (Crank-Nicolson, one Gauss-Newton solve per window):
//   min over c_1..c_n of sum_i dt ||(U_i - U_{i-1}) / dt - (f(U_i) + f(U_{i-1})) / 2||_W^2
// with U_i = Phi c_i or U(Phi c_i), and c_0 carried over from the previous window.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eulerrom/fields.hpp"
#include "eulerrom/finite_volume.hpp"
#include "eulerrom/inner_products.hpp"
#include "eulerrom/io.hpp"
#include "eulerrom/least_squares.hpp"
#include "eulerrom/pod.hpp"
#include "eulerrom/problems.hpp"

namespace eulerrom {

enum class Formulation : std::uint8_t {
  GalConsL2 = 0,
  GalConsL2Star = 1,
  GalEntL2 = 2,
  WlsConsL2 = 3,
  WlsConsL2Star = 4,
  WlsConsEnt = 5,
  WlsEntEnt = 6,
};

inline constexpr std::array<Formulation, 7> kAllFormulations = {
    Formulation::GalConsL2,  Formulation::GalConsL2Star, Formulation::GalEntL2,
    Formulation::WlsConsL2,  Formulation::WlsConsL2Star, Formulation::WlsConsEnt,
    Formulation::WlsEntEnt};

inline std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::GalConsL2: return "GalConsL2";
    case Formulation::GalConsL2Star: return "GalConsL2Star";
    case Formulation::GalEntL2: return "GalEntL2";
    case Formulation::WlsConsL2: return "WlsConsL2";
    case Formulation::WlsConsL2Star: return "WlsConsL2Star";
    case Formulation::WlsConsEnt: return "WlsConsEnt";
    case Formulation::WlsEntEnt: return "WlsEntEnt";
  }
  return "?";
}

inline Formulation parse_formulation(const std::string& s) {
  for (Formulation f : kAllFormulations) {
    if (to_string(f) == s) return f;
  }
  throw ConfigError("unknown formulation '" + s + "'");
}

struct FormulationTraits {
  bool galerkin;
  VariableSet variables;           // of the trial basis
  InnerProductKind basis_kind;     // inner product the basis was built in
  InnerProductKind residual_kind;  // projection (Galerkin) or minimization (WLS) weight
};

inline FormulationTraits traits(Formulation f) {
  using K = InnerProductKind;
  using V = VariableSet;
  switch (f) {
    case Formulation::GalConsL2: return {true, V::Conserved, K::L2, K::L2};
    case Formulation::GalConsL2Star: return {true, V::Conserved, K::L2Star, K::L2Star};
    case Formulation::GalEntL2: return {true, V::Entropy, K::EntropyA, K::L2};
    case Formulation::WlsConsL2: return {false, V::Conserved, K::L2, K::L2};
    case Formulation::WlsConsL2Star: return {false, V::Conserved, K::L2Star, K::L2Star};
    case Formulation::WlsConsEnt: return {false, V::Conserved, K::L2Star, K::EntropyAtilde};
    case Formulation::WlsEntEnt: return {false, V::Entropy, K::EntropyA, K::EntropyAtilde};
  }
  throw std::invalid_argument("unknown formulation");
}

inline std::string pairing_table() {
  std::string s = "formulation     basis variables  basis inner product  residual weight\n";
  for (Formulation f : kAllFormulations) {
    const auto t = traits(f);
    std::string row = to_string(f);
    row.resize(16, ' ');
    std::string v = to_string(t.variables);
    v.resize(17, ' ');
    std::string b = to_string(t.basis_kind);
    b.resize(21, ' ');
    s += row + v + b + to_string(t.residual_kind) + "\n";
  }
  return s;
}

class PairingError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Type-erased semi-discrete full-order model du/dt = f(u).
struct FullOrderModel {
  int dim = 1;
  Eigen::Index cells = 0;
  double cell_volume = 0.0;
  GasModel gas;
  std::function<bool(const Vector&, Vector&)> rhs;
  /// J_f(u) D for a block of directions D; may be empty.
  std::function<bool(const Vector&, const Matrix&, Matrix&)> tangent;

  Eigen::Index field_size() const { return cells * (dim + 2); }
};

template <int Dim>
FullOrderModel make_full_order_model(FiniteVolume<Dim> fv) {
  auto shared = std::make_shared<const FiniteVolume<Dim>>(std::move(fv));
  FullOrderModel m;
  m.dim = Dim;
  m.cells = shared->mesh().num_cells();
  m.cell_volume = shared->mesh().cell_volume();
  m.gas = shared->gas();
  m.rhs = [shared](const Vector& u, Vector& rate) { return shared->evaluate(u, rate); };
  m.tangent = [shared](const Vector& u, const Matrix& d, Matrix& out) { return shared->tangent(u, d, out); };
  return m;
}

inline FullOrderModel make_full_order_model(const ProblemConfig& cfg) {
  return dispatch_dimension(cfg.dimension(), [&](auto d) {
    return make_full_order_model(make_solver<decltype(d)::value>(cfg));
  });
}

/// How WLS windows linearize f: exact tangents of the finite-volume operator,
/// or forward differences in the coordinates.
enum class JacobianMode { Tangent, ForwardDifference };

struct RomSpec {
  Formulation formulation = Formulation::GalConsL2;
  PodBasis basis;
  std::shared_ptr<const WeightOperator> basis_weight;     // for projecting initial data
  std::shared_ptr<const WeightOperator> residual_weight;  // projection / minimization
  int window = 1;  // steps per WLS window
  double dt = 0.0;
  double time_scale = 1.0;  // WLS quadrature runs in units of this time
  int steps = 0;
  LeastSquaresSettings solver;
  JacobianMode jacobian = JacobianMode::Tangent;
};

/// Checks the basis against the formulation's pairing; throws PairingError
/// (with the full pairing table) on mismatch.
inline void check_pairing(Formulation f, const PodBasis& basis) {
  const auto t = traits(f);
  if (basis.variables != t.variables || basis.inner_product.kind != t.basis_kind) {
    throw PairingError(to_string(f) + " needs a basis in " + to_string(t.variables) + " variables built in " +
                       to_string(t.basis_kind) + ", got " + to_string(basis.variables) + " / " +
                       to_string(basis.inner_product.kind) + "\n" + pairing_table());
  }
}

/// Assembles a ROM for `cfg`. `conserved_snapshots` supply U_inf for the
/// entropy-A~ residual weight.
inline RomSpec make_rom_spec(Formulation f, PodBasis basis, const ProblemConfig& cfg,
                             const Matrix& conserved_snapshots, int window = 1) {
  check_pairing(f, basis);
  if (basis.dimension != cfg.dimension()) throw PairingError("basis dimension does not match the problem");
  const auto t = traits(f);
  if (!t.galerkin && window < 1) throw ConfigError("WLS window must be >= 1 step");
  RomSpec spec;
  spec.formulation = f;
  spec.window = t.galerkin ? 1 : window;
  spec.dt = cfg.dt();
  spec.time_scale = cfg.time_scale();
  spec.steps = cfg.total_steps();
  spec.basis_weight = std::make_shared<const WeightOperator>(build_weight(basis.inner_product, cfg));
  if (basis.modes.rows() != spec.basis_weight->size()) {
    throw PairingError("basis has " + std::to_string(basis.modes.rows()) + " rows, problem needs " +
                       std::to_string(spec.basis_weight->size()));
  }
  spec.residual_weight = std::make_shared<const WeightOperator>(
      build_weight(make_inner_product_spec(t.residual_kind, cfg, conserved_snapshots), cfg));
  spec.basis = std::move(basis);
  return spec;
}

struct RomTrajectory {
  Formulation formulation = Formulation::GalConsL2;
  double dt = 0.0;
  Matrix coords;  // K x (saved steps), column n at t = n dt
  bool stable = true;
  double t_first_nan = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
  std::vector<std::uint32_t> iteration_counts;  // Gauss-Newton iterations per WLS window
  std::vector<LeastSquaresReport> window_reports;

  Eigen::Index size() const { return coords.rows(); }
  Eigen::Index saved_steps() const { return coords.cols(); }
};

/// Basis variables of a conserved field.
inline Vector to_basis_variables(const Vector& conserved, const PodBasis& basis) {
  if (basis.variables == VariableSet::Conserved) return conserved;
  return conserved_to_entropy_field(conserved, basis.dimension, basis.inner_product.gas);
}

/// Conserved state Phi c or U(Phi c); false if inadmissible.
[[nodiscard]] inline bool conserved_state(const PodBasis& basis, const Vector& c, Vector& u) {
  if (basis.variables == VariableSet::Conserved) {
    u.noalias() = basis.modes * c;
    return u.allFinite();
  }
  const Vector v = basis.modes * c;
  return v.allFinite() && entropy_to_conserved_field(v, u, basis.dimension, basis.inner_product.gas);
}

/// Conserved field at saved step n; throws if inadmissible.
inline Vector reconstruct_state(const RomTrajectory& traj, const PodBasis& basis, Eigen::Index n) {
  Vector u;
  if (!conserved_state(basis, traj.coords.col(n), u)) {
    throw InadmissibleStateError("reconstruct_state: inadmissible ROM state");
  }
  return u;
}

// ---- Galerkin ------------------------------------------------------------------

class GalerkinSystem {
 public:
  GalerkinSystem(const RomSpec& spec, const FullOrderModel& model) : spec_(spec), model_(model) {
    if (!traits(spec.formulation).galerkin) throw std::invalid_argument("GalerkinSystem: not a Galerkin formulation");
    weighted_modes_ = spec.residual_weight->apply(spec.basis.modes);
    if (spec.basis.variables == VariableSet::Conserved) {
      Matrix mass = spec.basis.modes.transpose() * weighted_modes_;
      mass = 0.5 * (mass + mass.transpose());
      mass_.compute(mass);
      if (mass_.info() != Eigen::Success) throw std::domain_error("Galerkin mass matrix is singular");
    }
  }

  /// dc/dt; false on an inadmissible reconstruction, non-finite rate or
  /// singular mass matrix.
  [[nodiscard]] bool rhs(const Vector& c, Vector& dc) const {
    if (!c.allFinite()) return false;
    Vector u, f;
    if (!conserved_state(spec_.basis, c, u)) return false;
    if (!model_.rhs(u, f)) return false;
    const Vector b = weighted_modes_.transpose() * f;
    if (spec_.basis.variables == VariableSet::Conserved) {
      dc = mass_.solve(b);
    } else {
      Matrix am;
      try {
        am = apply_entropy_jacobian_field(u, spec_.basis.modes, spec_.basis.dimension, model_.gas);
      } catch (const InadmissibleStateError&) {
        return false;
      }
      Matrix mass = weighted_modes_.transpose() * am;
      mass = 0.5 * (mass + mass.transpose());
      Eigen::LLT<Matrix> llt(mass);
      if (llt.info() != Eigen::Success) return false;
      dc = llt.solve(b);
    }
    return dc.allFinite();
  }

 private:
  const RomSpec& spec_;
  const FullOrderModel& model_;
  Matrix weighted_modes_;  // W Phi
  Eigen::LLT<Matrix> mass_;
};

/// Generalized coordinates of a conserved initial field in the basis' own inner product.
inline Vector initial_coordinates(const RomSpec& spec, const Vector& initial_conserved) {
  return project(to_basis_variables(initial_conserved, spec.basis), spec.basis, *spec.basis_weight);
}

inline int resolve_steps(const RomSpec& spec, int steps) {
  const int n = steps < 0 ? spec.steps : steps;
  if (n < 0) throw std::invalid_argument("negative step count");
  return n;
}

inline RomTrajectory run_galerkin(const RomSpec& spec, const FullOrderModel& model,
                                  const Vector& initial_conserved, int steps = -1) {
  const auto start = std::chrono::steady_clock::now();
  const int n_steps = resolve_steps(spec, steps);
  const GalerkinSystem sys(spec, model);
  RomTrajectory traj;
  traj.formulation = spec.formulation;
  traj.dt = spec.dt;
  const Eigen::Index k = spec.basis.size();
  traj.coords.resize(k, n_steps + 1);
  Vector c = initial_coordinates(spec, initial_conserved);
  traj.coords.col(0) = c;
  const double dt = spec.dt;
  Vector k1, k2, k3, k4;
  Eigen::Index saved = 1;
  for (int n = 1; n <= n_steps; ++n) {
    const bool ok = sys.rhs(c, k1) && sys.rhs(c + 0.5 * dt * k1, k2) && sys.rhs(c + 0.5 * dt * k2, k3) &&
                    sys.rhs(c + dt * k3, k4);
    Vector next;
    if (ok) next = c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!ok || !next.allFinite()) {
      traj.stable = false;
      traj.t_first_nan = n * dt;
      break;
    }
    c = next;
    traj.coords.col(saved++) = c;
  }
  traj.coords.conservativeResize(k, saved);
  traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

// ---- windowed least squares -------------------------------------------------------

/// One WLS window: unknowns x = (c_1, ..., c_n) stacked, U_0 fixed. The
/// residual stacks s_i = sqrt(dt^) R t_ref ((U_i - U_{i-1}) / dt - (f_i + f_{i-1}) / 2)
/// with R the per-cell Cholesky factor of the residual weight and dt^ = dt / t_ref:
/// the time integral of the objective is taken in reference-time units, which
/// leaves the minimizer unchanged and makes the objective of a dimensionally
/// consistent formulation independent of the unit system.
class WlsWindow {
 public:
  WlsWindow(const RomSpec& spec, const FullOrderModel& model, Vector u0, Vector f0, int steps)
      : spec_(spec), model_(model), u0_(std::move(u0)), f0_(std::move(f0)), n_(steps) {
    if (steps < 1) throw std::invalid_argument("WlsWindow: empty window");
  }

  Eigen::Index unknowns() const { return spec_.basis.size() * n_; }
  int steps() const { return n_; }

  [[nodiscard]] bool residual(const Vector& x, Vector& r) const {
    std::vector<Vector> u, f;
    if (!states(x, u, f)) return false;
    stacked_residual(u, f, r);
    return r.allFinite();
  }

  /// Normal equations J^T J, J^T r from the block-bidiagonal structure: step i
  /// depends on c_i (block D_i) and c_{i-1} (block E_i). dU/dc is Phi or
  /// A(U) Phi; df/dc comes from the model's tangent, or from one full-order
  /// rhs evaluation per coordinate in forward-difference mode.
  [[nodiscard]] bool linearize(const Vector& x, const Vector& r, Linearization& lin) const {
    const Eigen::Index k = spec_.basis.size();
    std::vector<Vector> u, f;
    if (!states(x, u, f)) return false;
    const double q = quadrature_factor();
    std::vector<Matrix> d(n_ + 1), e(n_ + 1);  // d[i] = ds_i/dc_i, e[i] = ds_i/dc_{i-1}
    Matrix du, df;
    for (int i = 1; i <= n_; ++i) {
      if (!state_derivatives(x.segment((i - 1) * k, k), u[i], f[i], du, df)) return false;
      const Matrix g = spec_.residual_weight->cholesky_apply(du) * (q / spec_.dt);
      const Matrix hm = spec_.residual_weight->cholesky_apply(df) * (0.5 * q);
      d[i] = g - hm;
      if (i < n_) e[i + 1] = -g - hm;
    }
    const Eigen::Index rows = spec_.residual_weight->size();
    const Eigen::Index nk = unknowns();
    lin.jacobian.resize(0, 0);
    lin.jtj.setZero(nk, nk);
    lin.jtr.setZero(nk);
    for (int i = 1; i <= n_; ++i) {
      const Eigen::Index o = (i - 1) * k;
      const auto si = r.segment((i - 1) * rows, rows);
      lin.jtj.block(o, o, k, k) += d[i].transpose() * d[i];
      lin.jtr.segment(o, k) += d[i].transpose() * si;
      if (i >= 2) {
        const Eigen::Index op = (i - 2) * k;
        lin.jtj.block(op, op, k, k) += e[i].transpose() * e[i];
        const Matrix cross = e[i].transpose() * d[i];  // (c_{i-1}, c_i)
        lin.jtj.block(op, o, k, k) += cross;
        lin.jtj.block(o, op, k, k) += cross.transpose();
        lin.jtr.segment(op, k) += e[i].transpose() * si;
      }
    }
    return lin.jtj.allFinite() && lin.jtr.allFinite();
  }

  /// dU/dc and df/dc at coordinates c with state u and rate f.
  [[nodiscard]] bool state_derivatives(const Vector& c, const Vector& u, const Vector& f, Matrix& du,
                                       Matrix& df) const {
    const PodBasis& basis = spec_.basis;
    const bool conserved = basis.variables == VariableSet::Conserved;
    if (spec_.jacobian == JacobianMode::Tangent && model_.tangent) {
      if (conserved) {
        du = basis.modes;
      } else {
        try {
          du = apply_entropy_jacobian_field(u, basis.modes, basis.dimension, model_.gas);
        } catch (const InadmissibleStateError&) {
          return false;
        }
      }
      return model_.tangent(u, du, df);
    }
    const Eigen::Index k = basis.size();
    du.resize(u.size(), k);
    df.resize(u.size(), k);
    const double cs = c.cwiseAbs().maxCoeff();
    Vector cp = c, up, fp;
    for (Eigen::Index j = 0; j < k; ++j) {
      double h = spec_.solver.fd_step * std::max(std::abs(c[j]), cs);
      if (h == 0.0) h = spec_.solver.fd_step;
      cp[j] = c[j] + h;
      h = cp[j] - c[j];
      if (!conserved_state(basis, cp, up) || !model_.rhs(up, fp)) return false;
      du.col(j) = conserved ? Vector(basis.modes.col(j)) : Vector((up - u) / h);
      df.col(j) = (fp - f) / h;
      cp[j] = c[j];
    }
    return true;
  }

  /// States and rates at steps 0..n for stacked coordinates x.
  [[nodiscard]] bool states(const Vector& x, std::vector<Vector>& u, std::vector<Vector>& f) const {
    const Eigen::Index k = spec_.basis.size();
    if (x.size() != unknowns()) throw std::invalid_argument("WlsWindow: wrong unknown count");
    if (!x.allFinite()) return false;
    u.assign(n_ + 1, Vector());
    f.assign(n_ + 1, Vector());
    u[0] = u0_;
    f[0] = f0_;
    for (int i = 1; i <= n_; ++i) {
      if (!conserved_state(spec_.basis, x.segment((i - 1) * k, k), u[i])) return false;
      if (!model_.rhs(u[i], f[i])) return false;
    }
    return true;
  }

 private:
  void stacked_residual(const std::vector<Vector>& u, const std::vector<Vector>& f, Vector& r) const {
    const Eigen::Index rows = spec_.residual_weight->size();
    const double dt = spec_.dt;
    Matrix raw(rows, n_);
    for (int i = 1; i <= n_; ++i) raw.col(i - 1) = crank_nicolson_residual(u[i], u[i - 1], f[i], f[i - 1], dt);
    const Matrix w = spec_.residual_weight->cholesky_apply(raw) * quadrature_factor();
    r = Eigen::Map<const Vector>(w.data(), w.size());
  }

  // sqrt(dt / t_ref) * t_ref
  double quadrature_factor() const { return std::sqrt(spec_.dt * spec_.time_scale); }

  const RomSpec& spec_;
  const FullOrderModel& model_;
  Vector u0_, f0_;
  int n_;
};

inline RomTrajectory run_wls(const RomSpec& spec, const FullOrderModel& model,
                             const Vector& initial_conserved, int steps = -1) {
  const auto start = std::chrono::steady_clock::now();
  const int n_steps = resolve_steps(spec, steps);
  if (traits(spec.formulation).galerkin) throw std::invalid_argument("run_wls: not a WLS formulation");
  RomTrajectory traj;
  traj.formulation = spec.formulation;
  traj.dt = spec.dt;
  const Eigen::Index k = spec.basis.size();
  traj.coords.resize(k, n_steps + 1);
  Vector c = initial_coordinates(spec, initial_conserved);
  traj.coords.col(0) = c;
  Eigen::Index saved = 1;
  auto finish = [&] {
    traj.coords.conservativeResize(k, saved);
    traj.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return traj;
  };

  Vector u, f;
  if (!conserved_state(spec.basis, c, u) || !model.rhs(u, f)) {
    traj.stable = false;
    traj.t_first_nan = 0.0;
    return finish();
  }
  for (int first = 1; first <= n_steps; first += spec.window) {
    const int n = std::min(spec.window, n_steps - first + 1);
    const WlsWindow win(spec, model, u, f, n);
    Vector x0(k * n);
    for (int i = 0; i < n; ++i) x0.segment(i * k, k) = c;
    auto res = gauss_newton_solve(
        [&win](const Vector& x, Vector& r) { return win.residual(x, r); }, x0, spec.solver,
        [&win](const Vector& x, const Vector& r, Linearization& lin) { return win.linearize(x, r, lin); });
    traj.iteration_counts.push_back(std::uint32_t(res.report.iterations));
    traj.window_reports.push_back(res.report);
    std::vector<Vector> us, fs;
    if (!res.report.finite() || !win.states(res.x, us, fs)) {
      traj.stable = false;
      traj.t_first_nan = first * spec.dt;
      return finish();
    }
    for (int i = 0; i < n; ++i) traj.coords.col(saved++) = res.x.segment(i * k, k);
    c = res.x.tail(k);
    u = us[n];
    f = fs[n];
  }
  return finish();
}

inline RomTrajectory run_rom(const RomSpec& spec, const FullOrderModel& model,
                             const Vector& initial_conserved, int steps = -1) {
  return traits(spec.formulation).galerkin ? run_galerkin(spec, model, initial_conserved, steps)
                                           : run_wls(spec, model, initial_conserved, steps);
}

// ---- ERTJ trajectory file ----------------------------------------------------------
//
// "ERTJ", u32 version, u8 formulation, u64 K, u64 saved steps, float64 coords
// (step-major: the K coordinates of step 0, then step 1, ...), u8 stable,
// u64 count, u32 iteration counts[count]. All little-endian.

inline constexpr std::uint32_t kTrajectoryFormatVersion = 1;

inline void write_trajectory(std::ostream& os, const RomTrajectory& t) {
  io::write_magic(os, "ERTJ");
  io::write_le<std::uint32_t>(os, kTrajectoryFormatVersion);
  io::write_le<std::uint8_t>(os, std::uint8_t(t.formulation));
  io::write_le<std::uint64_t>(os, std::uint64_t(t.coords.rows()));
  io::write_le<std::uint64_t>(os, std::uint64_t(t.coords.cols()));
  for (Eigen::Index n = 0; n < t.coords.cols(); ++n) {
    for (Eigen::Index i = 0; i < t.coords.rows(); ++i) io::write_le<double>(os, t.coords(i, n));
  }
  io::write_le<std::uint8_t>(os, t.stable ? 1 : 0);
  io::write_le<std::uint64_t>(os, std::uint64_t(t.iteration_counts.size()));
  for (auto it : t.iteration_counts) io::write_le<std::uint32_t>(os, it);
}

/// dt, timing and solver reports are not stored.
inline RomTrajectory read_trajectory(std::istream& is) {
  io::expect_magic(is, "ERTJ");
  if (io::read_le<std::uint32_t>(is) != kTrajectoryFormatVersion) throw io::FormatError("ERTJ: unsupported version");
  RomTrajectory t;
  const auto f = io::read_le<std::uint8_t>(is);
  if (f >= kAllFormulations.size()) throw io::FormatError("ERTJ: bad formulation tag");
  t.formulation = Formulation(f);
  const auto k = io::read_le<std::uint64_t>(is);
  const auto n = io::read_le<std::uint64_t>(is);
  t.coords.resize(Eigen::Index(k), Eigen::Index(n));
  for (Eigen::Index j = 0; j < t.coords.cols(); ++j) {
    for (Eigen::Index i = 0; i < t.coords.rows(); ++i) t.coords(i, j) = io::read_le<double>(is);
  }
  t.stable = io::read_le<std::uint8_t>(is) != 0;
  t.iteration_counts.resize(io::read_le<std::uint64_t>(is));
  for (auto& it : t.iteration_counts) it = io::read_le<std::uint32_t>(is);
  return t;
}

inline void save_trajectory(const std::string& path, const RomTrajectory& t) {
  auto os = io::open_out(path);
  write_trajectory(os, t);
}

inline RomTrajectory load_trajectory(const std::string& path) {
  auto is = io::open_in(path);
  return read_trajectory(is);
}

}  // namespace eulerrom
