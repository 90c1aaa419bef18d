#pragma once

// Block-diagonal SPD weights defining the discrete inner products
//   <u, v>_W = sum_cells u_c^T B v_c vol_c
// for B = I (L2), diag(1/ref^2) (L2*), A = dU/dV at V_inf (entropy-A) and
// A^{-1} = dV/dU at U_inf (entropy-A~). All references are spatially constant,
// so one (d+2) x (d+2) block serves every cell.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "eulerrom/euler.hpp"
#include "eulerrom/fields.hpp"
#include "eulerrom/finite_volume.hpp"
#include "eulerrom/problems.hpp"

namespace eulerrom {

enum class InnerProductKind : std::uint8_t { L2 = 0, L2Star = 1, EntropyA = 2, EntropyAtilde = 3 };

inline std::string to_string(InnerProductKind k) {
  switch (k) {
    case InnerProductKind::L2: return "l2";
    case InnerProductKind::L2Star: return "l2star";
    case InnerProductKind::EntropyA: return "entropy-a";
    case InnerProductKind::EntropyAtilde: return "entropy-atilde";
  }
  return "?";
}

inline InnerProductKind parse_inner_product_kind(const std::string& s) {
  if (s == "l2") return InnerProductKind::L2;
  if (s == "l2star") return InnerProductKind::L2Star;
  if (s == "entropy-a") return InnerProductKind::EntropyA;
  if (s == "entropy-atilde") return InnerProductKind::EntropyAtilde;
  throw std::invalid_argument("unknown inner product '" + s +
                              "' (expected l2, l2star, entropy-a or entropy-atilde)");
}

/// Reference data for a weight: L2* scales, V_inf (entropy-A) or U_inf
/// (entropy-A~). Empty for L2.
struct ReferenceState {
  Vector values;
};

inline ReferenceState reference_for_l2star(const ProblemConfig& cfg) {
  return dispatch_dimension(cfg.dimension(), [&](auto d) {
    return ReferenceState{Vector(conserved_scales<decltype(d)::value>(cfg))};
  });
}

/// Spatio-temporal mean over every cell of every snapshot: of the entropy
/// variables for EntropyA, of the conserved variables for EntropyAtilde.
inline ReferenceState reference_from_snapshots(const Matrix& conserved, int dim,
                                               InnerProductKind kind, const GasModel& gas) {
  if (kind != InnerProductKind::EntropyA && kind != InnerProductKind::EntropyAtilde) {
    throw std::invalid_argument("reference_from_snapshots: only entropy kinds use snapshot means");
  }
  if (conserved.cols() == 0) throw std::invalid_argument("reference_from_snapshots: no snapshots");
  return dispatch_dimension(dim, [&](auto d) {
    constexpr int D = decltype(d)::value;
    constexpr int m = D + 2;
    const Eigen::Index cells = conserved.rows() / m;
    StateVector<D> sum = StateVector<D>::Zero();
    for (Eigen::Index j = 0; j < conserved.cols(); ++j) {
      for (Eigen::Index c = 0; c < cells; ++c) {
        const StateVector<D> u = conserved.col(j).template segment<m>(c * m);
        sum += kind == InnerProductKind::EntropyA ? conserved_to_entropy<D>(u, gas) : u;
      }
    }
    const StateVector<D> mean = sum / double(cells * conserved.cols());
    if (kind == InnerProductKind::EntropyA) {
      entropy_to_conserved<D>(mean, gas);  // throws if V_inf is not a valid state
    } else if (!is_admissible<D>(mean, gas)) {
      throw InadmissibleStateError("reference_from_snapshots: mean conserved state is inadmissible");
    }
    return ReferenceState{Vector(mean)};
  });
}

struct InnerProductSpec {
  InnerProductKind kind = InnerProductKind::L2;
  ReferenceState reference;
  GasModel gas;
};

/// Per-cell block B (without volume) for a spec.
inline Matrix weight_block(const InnerProductSpec& spec, int dim) {
  const int m = dim + 2;
  if (spec.kind == InnerProductKind::L2) return Matrix::Identity(m, m);
  if (spec.reference.values.size() != m) {
    throw std::invalid_argument("weight_block: reference has wrong number of components");
  }
  const Vector& r = spec.reference.values;
  switch (spec.kind) {
    case InnerProductKind::L2Star:
      if (!(r.array() > 0.0).all()) throw std::invalid_argument("L2* reference scales must be positive");
      return r.array().square().inverse().matrix().asDiagonal();
    case InnerProductKind::EntropyA:
      return dispatch_dimension(dim, [&](auto d) {
        constexpr int D = decltype(d)::value;
        const StateVector<D> u = entropy_to_conserved<D>(r, spec.gas);
        return Matrix(entropy_jacobian<D>(u, spec.gas));
      });
    case InnerProductKind::EntropyAtilde:
      return dispatch_dimension(dim, [&](auto d) {
        constexpr int D = decltype(d)::value;
        return Matrix(entropy_jacobian_inverse<D>(StateVector<D>(r), spec.gas));
      });
    default: break;
  }
  throw std::invalid_argument("weight_block: unknown kind");
}

/// Immutable block-diagonal weight W = diag(vol * B) with upper Cholesky
/// factor R (R^T R = vol * B) per cell.
class WeightOperator {
 public:
  WeightOperator(InnerProductSpec spec, int dim, Eigen::Index cells, double cell_volume)
      : spec_(std::move(spec)), dim_(dim), cells_(cells), volume_(cell_volume) {
    if (cells <= 0 || !(cell_volume > 0.0)) throw std::invalid_argument("WeightOperator: bad mesh");
    const Matrix b = weight_block(spec_, dim);
    block_ = cell_volume * b;
    Eigen::LLT<Matrix> llt(block_);
    if (llt.info() != Eigen::Success) {
      throw std::domain_error("WeightOperator: block is not symmetric positive definite");
    }
    factor_ = llt.matrixU();
  }

  const InnerProductSpec& spec() const { return spec_; }
  InnerProductKind kind() const { return spec_.kind; }
  int dimension() const { return dim_; }
  int components() const { return dim_ + 2; }
  Eigen::Index cells() const { return cells_; }
  Eigen::Index size() const { return cells_ * components(); }
  double cell_volume() const { return volume_; }
  /// vol * B.
  const Matrix& block() const { return block_; }
  /// Upper triangular R with R^T R = vol * B.
  const Matrix& factor() const { return factor_; }

  /// W x, column by column.
  Matrix apply(const Matrix& x) const { return per_cell(block_, x); }
  /// R x, so that <u, v>_W = (R u)^T (R v).
  Matrix cholesky_apply(const Matrix& x) const { return per_cell(factor_, x); }

  /// R^{-1} y.
  Matrix cholesky_solve(const Matrix& y) const {
    check(y);
    const int m = components();
    Matrix out(y.rows(), y.cols());
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      Eigen::Map<const Matrix> in(y.col(j).data(), m, cells_);
      Eigen::Map<Matrix> res(out.col(j).data(), m, cells_);
      res = factor_.triangularView<Eigen::Upper>().solve(in);
    }
    return out;
  }

  double inner(const Vector& u, const Vector& v) const {
    check(u);
    check(v);
    const int m = components();
    Eigen::Map<const Matrix> mu(u.data(), m, cells_), mv(v.data(), m, cells_);
    return (mu.cwiseProduct(block_ * mv)).sum();
  }

  double norm(const Vector& u) const { return std::sqrt(inner(u, u)); }

 private:
  void check(const Matrix& x) const {
    if (x.rows() != size()) throw std::invalid_argument("WeightOperator: field size mismatch");
  }

  Matrix per_cell(const Matrix& op, const Matrix& x) const {
    check(x);
    const int m = components();
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      Eigen::Map<const Matrix> in(x.col(j).data(), m, cells_);
      Eigen::Map<Matrix> res(out.col(j).data(), m, cells_);
      res.noalias() = op * in;
    }
    return out;
  }

  InnerProductSpec spec_;
  int dim_;
  Eigen::Index cells_;
  double volume_;
  Matrix block_;
  Matrix factor_;
};

inline WeightOperator build_weight(const InnerProductSpec& spec, int dim, Eigen::Index cells,
                                   double cell_volume) {
  return WeightOperator(spec, dim, cells, cell_volume);
}

template <int Dim>
WeightOperator build_weight(const InnerProductSpec& spec, const Mesh<Dim>& mesh) {
  return WeightOperator(spec, Dim, mesh.num_cells(), mesh.cell_volume());
}

inline double inner(const Vector& u, const Vector& v, const WeightOperator& w) { return w.inner(u, v); }

/// Weight of `kind` for a configuration; entropy kinds take their reference
/// from the (conserved) snapshot matrix.
inline InnerProductSpec make_inner_product_spec(InnerProductKind kind, const ProblemConfig& cfg,
                                                const Matrix& conserved_snapshots) {
  InnerProductSpec spec{kind, {}, cfg.gas()};
  switch (kind) {
    case InnerProductKind::L2: break;
    case InnerProductKind::L2Star: spec.reference = reference_for_l2star(cfg); break;
    default:
      spec.reference = reference_from_snapshots(conserved_snapshots, cfg.dimension(), kind, cfg.gas());
  }
  return spec;
}

inline WeightOperator build_weight(const InnerProductSpec& spec, const ProblemConfig& cfg) {
  return dispatch_dimension(cfg.dimension(), [&](auto d) {
    return build_weight(spec, make_mesh<decltype(d)::value>(cfg));
  });
}

}  // namespace eulerrom
