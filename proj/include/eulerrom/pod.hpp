#pragma once

// Vector-valued POD in a weighted inner product. With R the per-cell Cholesky
// factor of the weight (R^T R = W), the W-optimal rank-K subspace of the
// snapshots S is spanned by Phi = R^{-1} U_K, where U_K are the leading left
// singular vectors of R S.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "eulerrom/fields.hpp"
#include "eulerrom/inner_products.hpp"
#include "eulerrom/io.hpp"

namespace eulerrom {

enum class VariableSet : std::uint8_t { Conserved = 0, Entropy = 1 };

inline std::string to_string(VariableSet v) { return v == VariableSet::Conserved ? "conserved" : "entropy"; }

inline VariableSet parse_variable_set(const std::string& s) {
  if (s == "conserved") return VariableSet::Conserved;
  if (s == "entropy") return VariableSet::Entropy;
  throw std::invalid_argument("unknown variable set '" + s + "' (expected conserved or entropy)");
}

struct PodBasis {
  Matrix modes;             // (d+2) N x K, W-orthonormal
  Vector singular_values;   // sigma_1 >= ... >= sigma_K
  double truncated_energy = 0.0;  // sum_{i > K} sigma_i^2 over the training set
  InnerProductSpec inner_product;
  VariableSet variables = VariableSet::Conserved;
  int dimension = 1;

  Eigen::Index size() const { return modes.cols(); }
};

/// Snapshots in the requested variable set (entropy columns converted cell by cell).
inline Matrix snapshots_in(VariableSet vars, const Matrix& conserved, int dim, const GasModel& gas) {
  if (vars == VariableSet::Conserved) return conserved;
  Matrix out(conserved.rows(), conserved.cols());
  for (Eigen::Index j = 0; j < conserved.cols(); ++j) {
    out.col(j) = conserved_to_entropy_field(conserved.col(j), dim, gas);
  }
  return out;
}

/// Full weighted SVD of a snapshot matrix, truncated on demand by `truncate`.
struct WeightedSvd {
  Matrix whitened_modes;  // left singular vectors of R S, sign-normalized
  Vector singular_values;
  Eigen::Index rank = 0;  // numerical rank
};

inline WeightedSvd weighted_svd(const Matrix& snapshots, const WeightOperator& w) {
  if (snapshots.rows() != w.size()) throw std::invalid_argument("compute_pod: snapshot size mismatch");
  if (snapshots.cols() == 0) throw std::invalid_argument("compute_pod: no snapshots");
  const Matrix y = w.cholesky_apply(snapshots);
  Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeThinU);
  WeightedSvd out;
  out.whitened_modes = svd.matrixU();
  out.singular_values = svd.singularValues();
  const double tol = out.singular_values.size() > 0
                         ? out.singular_values[0] * 1e-13 * double(std::max(y.rows(), y.cols()))
                         : 0.0;
  out.rank = (out.singular_values.array() > tol).count();
  for (Eigen::Index k = 0; k < out.whitened_modes.cols(); ++k) {
    Eigen::Index imax = 0;
    out.whitened_modes.col(k).cwiseAbs().maxCoeff(&imax);
    if (out.whitened_modes(imax, k) < 0.0) out.whitened_modes.col(k) *= -1.0;
  }
  return out;
}

inline PodBasis truncate(const WeightedSvd& svd, const WeightOperator& w, Eigen::Index k,
                         VariableSet vars) {
  if (k < 1) throw std::invalid_argument("compute_pod: K must be >= 1");
  if (k > svd.rank) {
    throw std::invalid_argument("compute_pod: K = " + std::to_string(k) +
                                " exceeds the snapshot rank " + std::to_string(svd.rank));
  }
  PodBasis b;
  b.modes = w.cholesky_solve(svd.whitened_modes.leftCols(k));
  b.singular_values = svd.singular_values.head(k);
  b.truncated_energy = svd.singular_values.tail(svd.singular_values.size() - k).squaredNorm();
  b.inner_product = w.spec();
  b.variables = vars;
  b.dimension = w.dimension();
  return b;
}

/// POD of snapshots already expressed in `vars`.
inline PodBasis compute_pod(const Matrix& snapshots, const WeightOperator& w, Eigen::Index k,
                            VariableSet vars = VariableSet::Conserved) {
  return truncate(weighted_svd(snapshots, w), w, k, vars);
}

/// Generalized coordinates Phi^T W x (columns of x treated independently).
inline Matrix project(const Matrix& x, const PodBasis& basis, const WeightOperator& w) {
  return basis.modes.transpose() * w.apply(x);
}

inline Matrix reconstruct(const Matrix& coords, const PodBasis& basis) { return basis.modes * coords; }

/// max |Phi^T W Phi - I|.
inline double orthonormality_defect(const PodBasis& basis, const WeightOperator& w) {
  const Matrix g = basis.modes.transpose() * w.apply(basis.modes);
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

/// Per conserved variable q: sqrt(sum_i ||q~_i - q_i||^2 / sum_i ||q_i||^2) in
/// L2, where q~ is the projection reconstruction. Entropy-variable
/// reconstructions are mapped back to conserved variables cell by cell; an
/// inadmissible reconstruction yields +inf for every variable.
inline std::vector<double> projection_error_by_variable(const Matrix& conserved,
                                                        const PodBasis& basis,
                                                        const WeightOperator& w) {
  const int dim = basis.dimension;
  const int m = dim + 2;
  const GasModel& gas = basis.inner_product.gas;
  const Matrix data = snapshots_in(basis.variables, conserved, dim, gas);
  Matrix approx = reconstruct(project(data, basis, w), basis);
  if (basis.variables == VariableSet::Entropy) {
    for (Eigen::Index j = 0; j < approx.cols(); ++j) {
      Vector u;
      if (!entropy_to_conserved_field(approx.col(j), u, dim, gas)) {
        return std::vector<double>(m, std::numeric_limits<double>::infinity());
      }
      approx.col(j) = u;
    }
  }
  std::vector<double> num(m, 0.0), den(m, 0.0);
  const Eigen::Index cells = conserved.rows() / m;
  for (Eigen::Index j = 0; j < conserved.cols(); ++j) {
    Eigen::Map<const Matrix> q(conserved.col(j).data(), m, cells);
    Eigen::Map<const Matrix> qa(approx.col(j).data(), m, cells);
    for (int v = 0; v < m; ++v) {
      num[v] += (qa.row(v) - q.row(v)).squaredNorm();
      den[v] += q.row(v).squaredNorm();
    }
  }
  std::vector<double> out(m);
  for (int v = 0; v < m; ++v) out[v] = den[v] > 0.0 ? std::sqrt(num[v] / den[v]) : std::sqrt(num[v]);
  return out;
}

/// sum_i ||s_i - Phi Phi^T W s_i||_W^2 for snapshots in the basis' variables.
inline double projection_energy_residual(const Matrix& snapshots, const PodBasis& basis,
                                         const WeightOperator& w) {
  const Matrix err = snapshots - reconstruct(project(snapshots, basis, w), basis);
  return w.cholesky_apply(err).squaredNorm();
}

// ---- ERPB basis file ----------------------------------------------------------
//
// "ERPB", u32 version, u8 inner-product kind, u8 variable set, u32 d,
// float64 reference[4] (first d + 2 used), u64 rows, u64 K, float64 sigma[K],
// row-major float64 Phi (rows x K). All little-endian.

inline constexpr std::uint32_t kBasisFormatVersion = 1;
inline constexpr int kReferenceSlots = 4;

inline void write_basis(std::ostream& os, const PodBasis& b) {
  io::write_magic(os, "ERPB");
  io::write_le<std::uint32_t>(os, kBasisFormatVersion);
  io::write_le<std::uint8_t>(os, std::uint8_t(b.inner_product.kind));
  io::write_le<std::uint8_t>(os, std::uint8_t(b.variables));
  io::write_le<std::uint32_t>(os, std::uint32_t(b.dimension));
  for (int i = 0; i < kReferenceSlots; ++i) {
    const Vector& r = b.inner_product.reference.values;
    io::write_le<double>(os, i < r.size() ? r[i] : 0.0);
  }
  io::write_le<std::uint64_t>(os, std::uint64_t(b.modes.rows()));
  io::write_le<std::uint64_t>(os, std::uint64_t(b.modes.cols()));
  for (Eigen::Index k = 0; k < b.singular_values.size(); ++k) io::write_le<double>(os, b.singular_values[k]);
  for (Eigen::Index r = 0; r < b.modes.rows(); ++r) {
    for (Eigen::Index c = 0; c < b.modes.cols(); ++c) io::write_le<double>(os, b.modes(r, c));
  }
}

/// The gas model is not stored; the caller supplies it.
inline PodBasis read_basis(std::istream& is, const GasModel& gas) {
  io::expect_magic(is, "ERPB");
  if (io::read_le<std::uint32_t>(is) != kBasisFormatVersion) throw io::FormatError("ERPB: unsupported version");
  PodBasis b;
  const auto kind = io::read_le<std::uint8_t>(is);
  const auto vars = io::read_le<std::uint8_t>(is);
  if (kind > 3 || vars > 1) throw io::FormatError("ERPB: bad tag");
  b.inner_product.kind = InnerProductKind(kind);
  b.inner_product.gas = gas;
  b.variables = VariableSet(vars);
  b.dimension = int(io::read_le<std::uint32_t>(is));
  if (b.dimension != 1 && b.dimension != 2) throw io::FormatError("ERPB: bad dimension");
  Vector ref(kReferenceSlots);
  for (int i = 0; i < kReferenceSlots; ++i) ref[i] = io::read_le<double>(is);
  if (b.inner_product.kind != InnerProductKind::L2) {
    b.inner_product.reference.values = ref.head(b.dimension + 2);
  }
  const auto rows = io::read_le<std::uint64_t>(is);
  const auto k = io::read_le<std::uint64_t>(is);
  if (rows % std::uint64_t(b.dimension + 2) != 0) throw io::FormatError("ERPB: bad row count");
  b.singular_values.resize(Eigen::Index(k));
  for (Eigen::Index i = 0; i < Eigen::Index(k); ++i) b.singular_values[i] = io::read_le<double>(is);
  b.modes.resize(Eigen::Index(rows), Eigen::Index(k));
  for (Eigen::Index r = 0; r < b.modes.rows(); ++r) {
    for (Eigen::Index c = 0; c < b.modes.cols(); ++c) b.modes(r, c) = io::read_le<double>(is);
  }
  return b;
}

inline void save_basis(const std::string& path, const PodBasis& b) {
  auto os = io::open_out(path);
  write_basis(os, b);
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline PodBasis load_basis(const std::string& path, const GasModel& gas) {
  auto is = io::open_in(path);
  return read_basis(is, gas);
}

}  // namespace eulerrom
