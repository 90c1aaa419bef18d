#pragma once

// Whole-field versions of the pointwise maps in euler.hpp, with the spatial
// dimension chosen at run time.

#include <stdexcept>
#include <type_traits>

#include "eulerrom/euler.hpp"
#include "eulerrom/finite_volume.hpp"

namespace eulerrom {

/// Calls f(std::integral_constant<int, Dim>{}) for Dim in {1, 2}.
template <class F>
decltype(auto) dispatch_dimension(int dim, F&& f) {
  if (dim == 1) return f(std::integral_constant<int, 1>{});
  if (dim == 2) return f(std::integral_constant<int, 2>{});
  throw std::invalid_argument("dimension must be 1 or 2");
}

inline Eigen::Index checked_cell_count(const Vector& field, int dim) {
  const Eigen::Index m = dim + 2;
  if (field.size() % m != 0) throw std::invalid_argument("field size is not a multiple of d + 2");
  return field.size() / m;
}

/// Throws InadmissibleStateError if any cell is inadmissible.
inline Vector conserved_to_entropy_field(const Vector& u, int dim, const GasModel& gas) {
  return dispatch_dimension(dim, [&](auto d) {
    constexpr int D = decltype(d)::value;
    const Eigen::Index n = checked_cell_count(u, D);
    Vector v(u.size());
    for (Eigen::Index c = 0; c < n; ++c) {
      v.template segment<D + 2>(c * (D + 2)) =
          conserved_to_entropy<D>(u.template segment<D + 2>(c * (D + 2)), gas);
    }
    return v;
  });
}

/// Returns false (leaving `u` unspecified) if any cell maps to an inadmissible state.
[[nodiscard]] inline bool entropy_to_conserved_field(const Vector& v, Vector& u, int dim,
                                                     const GasModel& gas) {
  return dispatch_dimension(dim, [&](auto d) {
    constexpr int D = decltype(d)::value;
    const Eigen::Index n = checked_cell_count(v, D);
    u.resize(v.size());
    try {
      for (Eigen::Index c = 0; c < n; ++c) {
        u.template segment<D + 2>(c * (D + 2)) =
            entropy_to_conserved<D>(v.template segment<D + 2>(c * (D + 2)), gas);
      }
    } catch (const InadmissibleStateError&) {
      return false;
    }
    return true;
  });
}

inline Vector entropy_to_conserved_field(const Vector& v, int dim, const GasModel& gas) {
  Vector u;
  if (!entropy_to_conserved_field(v, u, dim, gas)) {
    throw InadmissibleStateError("entropy_to_conserved_field: inadmissible state");
  }
  return u;
}

/// out.col(j) = A(u_c) x.col(j) cell by cell, with A = dU/dV at the conserved state u.
inline Matrix apply_entropy_jacobian_field(const Vector& u, const Matrix& x, int dim,
                                           const GasModel& gas) {
  return dispatch_dimension(dim, [&](auto d) {
    constexpr int D = decltype(d)::value;
    constexpr int m = D + 2;
    const Eigen::Index n = checked_cell_count(u, D);
    if (x.rows() != u.size()) throw std::invalid_argument("apply_entropy_jacobian_field: size mismatch");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index c = 0; c < n; ++c) {
      const StateMatrix<D> a = entropy_jacobian<D>(u.template segment<m>(c * m), gas);
      out.middleRows(c * m, m).noalias() = a * x.middleRows(c * m, m);
    }
    return out;
  });
}

}  // namespace eulerrom
