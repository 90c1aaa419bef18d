#pragma once

// Canonical problems (Sod shock tube, Kelvin-Helmholtz, 2D homogeneous
// turbulence) in paired dimensional / non-dimensional configurations, the
// full-order RK4 runner and snapshot storage.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "eulerrom/euler.hpp"
#include "eulerrom/fields.hpp"
#include "eulerrom/finite_volume.hpp"
#include "eulerrom/io.hpp"
#include "eulerrom/turbulence.hpp"

namespace eulerrom {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ProblemKind { Sod, KelvinHelmholtz, HomogeneousTurbulence };

inline std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::Sod: return "sod";
    case ProblemKind::KelvinHelmholtz: return "kh";
    case ProblemKind::HomogeneousTurbulence: return "hit";
  }
  return "?";
}

inline ProblemKind parse_problem_kind(const std::string& s) {
  if (s == "sod") return ProblemKind::Sod;
  if (s == "kh") return ProblemKind::KelvinHelmholtz;
  if (s == "hit") return ProblemKind::HomogeneousTurbulence;
  throw ConfigError("unknown problem '" + s + "' (expected sod, kh or hit)");
}

struct ProblemConfig {
  ProblemKind problem = ProblemKind::Sod;
  bool dimensional = false;
  int cells = 200;  // per axis
  double final_time_nd = 0.25;
  int snapshot_stride = 1;
  double weno_epsilon = 1e-6;  // non-dimensional; rescaled per component
  std::uint64_t seed = 0;
  double turbulence_u0 = 25.0;  // in units of a_inf
  double gamma = 1.4;
  double cfl = 0.25;

  static constexpr double kDimensionalDensity = 1.225;
  static constexpr double kDimensionalPressure = 101325.0;

  int dimension() const { return problem == ProblemKind::Sod ? 1 : 2; }
  double rho_inf() const { return dimensional ? kDimensionalDensity : 1.0; }
  double p_inf() const { return dimensional ? kDimensionalPressure : 1.0 / gamma; }
  double a_inf() const { return std::sqrt(gamma * p_inf() / rho_inf()); }

  double domain_lower() const { return problem == ProblemKind::Sod ? -0.5 : -5.0; }
  double domain_upper() const { return problem == ProblemKind::Sod ? 0.5 : 5.0; }
  double dx() const { return (domain_upper() - domain_lower()) / cells; }
  double dt() const { return cfl * dx() / a_inf(); }
  double final_time() const { return final_time_nd / a_inf(); }
  /// Reference time L / a_inf with L = 1.
  double time_scale() const { return 1.0 / a_inf(); }
  int total_steps() const { return int(std::lround(final_time_nd / (cfl * dx()))); }
  int num_snapshots() const { return 1 + total_steps() / snapshot_stride; }

  BoundaryKind boundary() const {
    return problem == ProblemKind::Sod ? BoundaryKind::ZeroGradient : BoundaryKind::Periodic;
  }

  GasModel gas() const {
    return GasModel{gamma, rho_inf(), rho_inf() * a_inf() * a_inf()};
  }

  void validate() const {
    if (cells < kMinCellsPerAxis) throw ConfigError("cells must be >= 11");
    if (!(final_time_nd > 0.0)) throw ConfigError("final_time_nd must be positive");
    if (snapshot_stride < 1) throw ConfigError("snapshot_stride must be >= 1");
    if (!(weno_epsilon > 0.0)) throw ConfigError("weno_epsilon must be positive");
    if (!(gamma > 1.0)) throw ConfigError("gamma must be > 1");
    if (!(cfl > 0.0)) throw ConfigError("cfl must be positive");
    if (problem == ProblemKind::HomogeneousTurbulence && cells / 2 < 25) {
      throw ConfigError("hit: grid too coarse to resolve k_p = 25 (need cells >= 50)");
    }
  }
};

/// Reference scales of (rho, rho u_1, [rho u_2], rho E): (rho_inf, rho_inf a_inf, ..., rho_inf a_inf^2).
template <int Dim>
StateVector<Dim> conserved_scales(const ProblemConfig& cfg) {
  StateVector<Dim> s;
  const double r = cfg.rho_inf(), a = cfg.a_inf();
  s[0] = r;
  for (int k = 1; k <= Dim; ++k) s[k] = r * a;
  s[Dim + 1] = r * a * a;
  return s;
}

/// Desk-scale presets; `full_scale` selects the large production grids.
inline ProblemConfig preset(ProblemKind kind, bool dimensional, bool full_scale = false) {
  ProblemConfig c;
  c.problem = kind;
  c.dimensional = dimensional;
  switch (kind) {
    case ProblemKind::Sod:
      c.cells = full_scale ? 500 : 200;
      c.final_time_nd = 0.25;
      c.snapshot_stride = 1;
      c.weno_epsilon = 1e-6;
      break;
    case ProblemKind::KelvinHelmholtz:
      c.cells = full_scale ? 256 : 64;
      c.final_time_nd = 50.0;
      c.snapshot_stride = 5;
      c.weno_epsilon = 1e-20;
      break;
    case ProblemKind::HomogeneousTurbulence:
      c.cells = full_scale ? 512 : 64;
      c.final_time_nd = 20.0;
      c.snapshot_stride = 5;
      c.weno_epsilon = 1e-20;
      c.turbulence_u0 = full_scale ? 25.0 : 0.2;
      c.seed = 1;
      break;
  }
  return c;
}

template <int Dim>
Mesh<Dim> make_mesh(const ProblemConfig& cfg) {
  if (cfg.dimension() != Dim) throw ConfigError("problem dimension mismatch");
  return uniform_mesh<Dim>(cfg.cells, cfg.domain_lower(), cfg.domain_upper(), cfg.boundary());
}

template <int Dim>
FiniteVolume<Dim> make_solver(const ProblemConfig& cfg) {
  return FiniteVolume<Dim>(make_mesh<Dim>(cfg), cfg.gas(), WenoConfig{cfg.weno_epsilon},
                           conserved_scales<Dim>(cfg));
}

inline Vector sod_init(const ProblemConfig& cfg) {
  if (cfg.problem != ProblemKind::Sod) throw ConfigError("sod_init: wrong problem");
  const auto mesh = make_mesh<1>(cfg);
  const GasModel gas = cfg.gas();
  const double r = cfg.rho_inf(), p = cfg.p_inf(), g = cfg.gamma;
  const Eigen::Matrix<double, 1, 1> zero = Eigen::Matrix<double, 1, 1>::Zero();
  const StateVector<1> left = from_primitive<1>(r, zero, g * p, gas);
  const StateVector<1> right = from_primitive<1>(r / 8.0, zero, g * p / 10.0, gas);
  Vector u(mesh.field_size());
  for (int i = 0; i < mesh.cells[0]; ++i) {
    u.segment<3>(3 * i) = mesh.center(0, i) < 0.0 ? left : right;
  }
  return u;
}

/// Band membership for Omega_2 = [-5,5] x [-2 + cos(0.8 pi x), 2 + cos(0.8 pi x)].
inline bool in_kh_band(double x, double y) {
  const double c = std::cos(0.8 * std::numbers::pi * x);
  return y >= -2.0 + c && y <= 2.0 + c;
}

inline Vector kh_init(const ProblemConfig& cfg) {
  if (cfg.problem != ProblemKind::KelvinHelmholtz) throw ConfigError("kh_init: wrong problem");
  const auto mesh = make_mesh<2>(cfg);
  const GasModel gas = cfg.gas();
  const double r = cfg.rho_inf(), p = 3.5 * cfg.p_inf(), a = cfg.a_inf();
  const StateVector<2> outer = from_primitive<2>(2.0 * r, Eigen::Vector2d(0.5 * a, 0.0), p, gas);
  const StateVector<2> band = from_primitive<2>(r, Eigen::Vector2d(-0.5 * a, 0.0), p, gas);
  Vector u(mesh.field_size());
  for (int j = 0; j < mesh.cells[1]; ++j) {
    for (int i = 0; i < mesh.cells[0]; ++i) {
      const int c = i + mesh.cells[0] * j;
      u.segment<4>(4 * c) = in_kh_band(mesh.center(0, i), mesh.center(1, j)) ? band : outer;
    }
  }
  return u;
}

inline TurbulenceSpectrum turbulence_spectrum(const ProblemConfig& cfg) {
  TurbulenceSpectrum s;
  s.u0 = cfg.turbulence_u0 * cfg.a_inf();
  return s;
}

inline Vector hit_init(const ProblemConfig& cfg) {
  if (cfg.problem != ProblemKind::HomogeneousTurbulence) throw ConfigError("hit_init: wrong problem");
  cfg.validate();
  const auto mesh = make_mesh<2>(cfg);
  const GasModel gas = cfg.gas();
  const VelocityField vel = random_solenoidal_velocity(
      cfg.cells, cfg.domain_upper() - cfg.domain_lower(), turbulence_spectrum(cfg), cfg.seed);
  Vector u(mesh.field_size());
  for (int j = 0; j < mesh.cells[1]; ++j) {
    for (int i = 0; i < mesh.cells[0]; ++i) {
      const int c = i + mesh.cells[0] * j;
      u.segment<4>(4 * c) = from_primitive<2>(
          cfg.rho_inf(), Eigen::Vector2d(vel.u1(i, j), vel.u2(i, j)), cfg.p_inf(), gas);
    }
  }
  return u;
}

inline Vector initial_condition(const ProblemConfig& cfg) {
  switch (cfg.problem) {
    case ProblemKind::Sod: return sod_init(cfg);
    case ProblemKind::KelvinHelmholtz: return kh_init(cfg);
    case ProblemKind::HomogeneousTurbulence: return hit_init(cfg);
  }
  throw ConfigError("unknown problem");
}

/// Snapshot matrix: one column per saved state, (Dim + 2) * N rows.
struct SnapshotSet {
  Matrix data;
  std::vector<double> times;
  ProblemConfig config;

  Eigen::Index num_snapshots() const { return data.cols(); }
};

template <int Dim>
SnapshotSet run_fom(const ProblemConfig& cfg) {
  cfg.validate();
  const FiniteVolume<Dim> fv = make_solver<Dim>(cfg);
  const int steps = cfg.total_steps();
  const double dt = cfg.dt();
  SnapshotSet out;
  out.config = cfg;
  out.data.resize(fv.mesh().field_size(), cfg.num_snapshots());
  Vector u = initial_condition(cfg);
  Eigen::Index col = 0;
  out.data.col(col++) = u;
  out.times.push_back(0.0);
  for (int n = 1; n <= steps; ++n) {
    u = rk4_step(u, dt, fv);  // throws NonFiniteError on blow-up
    if (n % cfg.snapshot_stride == 0) {
      out.data.col(col++) = u;
      out.times.push_back(n * dt);
    }
  }
  return out;
}

inline SnapshotSet run_fom(const ProblemConfig& cfg) {
  return dispatch_dimension(cfg.dimension(), [&](auto d) { return run_fom<decltype(d)::value>(cfg); });
}

/// Maps a field of a dimensional configuration to non-dimensional units.
template <int Dim>
Vector nondimensionalize(const Vector& u, const ProblemConfig& cfg) {
  const StateVector<Dim> s = conserved_scales<Dim>(cfg);
  Vector out = u;
  for (Eigen::Index c = 0; c < u.size() / (Dim + 2); ++c) {
    out.template segment<Dim + 2>(c * (Dim + 2)).array() /= s.array();
  }
  return out;
}

// ---- config text format ----------------------------------------------------

inline ProblemConfig config_from_key_values(const io::KeyValues& kv) {
  if (!kv.count("problem")) throw ConfigError("config: missing key 'problem'");
  const ProblemKind kind = parse_problem_kind(kv.at("problem"));
  const bool dimensional = kv.count("dimensional") ? io::parse_bool("dimensional", kv.at("dimensional")) : false;
  const bool full = kv.count("full_scale") ? io::parse_bool("full_scale", kv.at("full_scale")) : false;
  ProblemConfig c = preset(kind, dimensional, full);
  for (const auto& [key, value] : kv) {
    if (key == "problem" || key == "dimensional" || key == "full_scale") continue;
    if (key == "cells") c.cells = int(io::parse_int(key, value));
    else if (key == "final_time_nd") c.final_time_nd = io::parse_double(key, value);
    else if (key == "snapshot_stride") c.snapshot_stride = int(io::parse_int(key, value));
    else if (key == "weno_epsilon") c.weno_epsilon = io::parse_double(key, value);
    else if (key == "seed") c.seed = std::uint64_t(io::parse_int(key, value));
    else if (key == "turbulence_u0") c.turbulence_u0 = io::parse_double(key, value);
    else if (key == "gamma") c.gamma = io::parse_double(key, value);
    else if (key == "cfl") c.cfl = io::parse_double(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

inline ProblemConfig read_config(const std::string& path) {
  try {
    return config_from_key_values(io::read_key_values(path));
  } catch (const io::FormatError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void write_config(std::ostream& os, const ProblemConfig& c) {
  os << "problem = " << to_string(c.problem) << "\n"
     << "dimensional = " << (c.dimensional ? "true" : "false") << "\n"
     << "cells = " << c.cells << "\n"
     << "final_time_nd = " << io::format_double(c.final_time_nd) << "\n"
     << "snapshot_stride = " << c.snapshot_stride << "\n"
     << "weno_epsilon = " << io::format_double(c.weno_epsilon) << "\n"
     << "seed = " << c.seed << "\n";
  if (c.problem == ProblemKind::HomogeneousTurbulence) {
    os << "turbulence_u0 = " << io::format_double(c.turbulence_u0) << "\n";
  }
  if (c.gamma != 1.4) os << "gamma = " << io::format_double(c.gamma) << "\n";
  if (c.cfl != 0.25) os << "cfl = " << io::format_double(c.cfl) << "\n";
}

inline void write_config(const std::string& path, const ProblemConfig& c) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_config(os, c);
}

// ---- ERSN snapshot file --------------------------------------------------------
//
// "ERSN", u32 version, u32 d, u64 N_cells, u64 n_snapshots, u64 components,
// row-major float64 payload ((components * N_cells) rows x n_snapshots columns),
// float64 times[n_snapshots]. All little-endian.

inline constexpr std::uint32_t kSnapshotFormatVersion = 1;

inline void write_snapshots(std::ostream& os, const SnapshotSet& s) {
  const std::uint32_t d = std::uint32_t(s.config.dimension());
  const std::uint64_t comps = d + 2;
  const std::uint64_t cells = std::uint64_t(s.data.rows()) / comps;
  io::write_magic(os, "ERSN");
  io::write_le<std::uint32_t>(os, kSnapshotFormatVersion);
  io::write_le<std::uint32_t>(os, d);
  io::write_le<std::uint64_t>(os, cells);
  io::write_le<std::uint64_t>(os, std::uint64_t(s.data.cols()));
  io::write_le<std::uint64_t>(os, comps);
  for (Eigen::Index r = 0; r < s.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.data.cols(); ++c) io::write_le<double>(os, s.data(r, c));
  }
  for (double t : s.times) io::write_le<double>(os, t);
}

/// Reads the payload; `config` is left default-constructed.
inline SnapshotSet read_snapshots(std::istream& is) {
  io::expect_magic(is, "ERSN");
  const auto version = io::read_le<std::uint32_t>(is);
  if (version != kSnapshotFormatVersion) throw io::FormatError("ERSN: unsupported version");
  const auto d = io::read_le<std::uint32_t>(is);
  const auto cells = io::read_le<std::uint64_t>(is);
  const auto ns = io::read_le<std::uint64_t>(is);
  const auto comps = io::read_le<std::uint64_t>(is);
  if ((d != 1 && d != 2) || comps != d + 2) throw io::FormatError("ERSN: bad dimensions");
  SnapshotSet s;
  s.data.resize(Eigen::Index(cells * comps), Eigen::Index(ns));
  for (Eigen::Index r = 0; r < s.data.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.data.cols(); ++c) s.data(r, c) = io::read_le<double>(is);
  }
  s.times.resize(ns);
  for (auto& t : s.times) t = io::read_le<double>(is);
  return s;
}

/// Snapshot file plus its configuration in a sidecar `<path>.cfg`.
inline void save_snapshots(const std::string& path, const SnapshotSet& s) {
  auto os = io::open_out(path);
  write_snapshots(os, s);
  write_config(path + ".cfg", s.config);
}

inline SnapshotSet load_snapshots(const std::string& path) {
  auto is = io::open_in(path);
  SnapshotSet s = read_snapshots(is);
  s.config = read_config(path + ".cfg");
  if (s.data.rows() != Eigen::Index(s.config.dimension() + 2) *
                           Eigen::Index(std::pow(s.config.cells, s.config.dimension()))) {
    throw io::FormatError(path + ": payload does not match its configuration");
  }
  return s;
}

}  // namespace eulerrom
