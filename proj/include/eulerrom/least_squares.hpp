#pragma once

// Gauss-Newton for min ||r(x)||^2 with a Levenberg-Marquardt fallback.
//
// Each iteration first tries the undamped Gauss-Newton step; if it does not
// reduce the residual norm, Marquardt-scaled damped steps
// (J^T J + lambda diag(J^T J)) dx = -J^T r are tried with lambda growing by 10
// on failure and shrinking by 10 on success. Only decreasing steps are
// accepted, so accepted residual norms are monotone.
//
// A solve is converged only when the gradient test ||J^T r|| <= gtol holds.
// Stopping on the step test means no further progress is measurable, which
// at a nonzero-residual minimum can happen before the gradient test passes.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "eulerrom/finite_volume.hpp"

namespace eulerrom {

struct LeastSquaresSettings {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;  // ||J^T r||_2
  double step_tolerance = 1e-10;     // ||dx|| <= xtol (xtol + ||x||)
  double initial_damping = 1e-4;
  bool damping = true;
  int max_damping_attempts = 12;
  double fd_step = 1e-7;

  void validate() const {
    if (max_iterations < 1 || !(gradient_tolerance > 0.0) || !(step_tolerance > 0.0) ||
        !(initial_damping > 0.0) || !(fd_step > 0.0)) {
      throw std::invalid_argument("LeastSquaresSettings: tolerances must be positive");
    }
  }
};

enum class StopReason { Gradient, Step, MaxIterations, Stalled, NonFinite };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::Gradient: return "gradient";
    case StopReason::Step: return "step";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::Stalled: return "stalled";
    case StopReason::NonFinite: return "non-finite";
  }
  return "?";
}

struct LeastSquaresReport {
  int iterations = 0;  // accepted steps
  StopReason reason = StopReason::MaxIterations;
  std::vector<double> residual_norms;  // initial and after each accepted step
  double gradient_norm = std::numeric_limits<double>::infinity();  // at the returned point

  bool converged() const { return reason == StopReason::Gradient; }
  bool finite() const { return reason != StopReason::NonFinite; }
  bool monotone() const {
    for (std::size_t i = 1; i < residual_norms.size(); ++i) {
      if (!(residual_norms[i] <= residual_norms[i - 1])) return false;
    }
    return true;
  }
};

/// Writes r(x); returns false if r is undefined or non-finite at x.
using ResidualFunction = std::function<bool(const Vector& x, Vector& r)>;

/// Linearization at x: either the Jacobian J itself, or the normal-equation
/// pieces J^T J and J^T r when J is too large to keep.
struct Linearization {
  Matrix jacobian;  // empty if only the normal equations are given
  Matrix jtj;
  Vector jtr;
};

using LinearizeFunction = std::function<bool(const Vector& x, const Vector& r, Linearization& lin)>;

/// Forward differences with h_j = step * max(|x_j|, ||x||_inf), or `step`
/// when x = 0.
inline bool finite_difference_jacobian(const ResidualFunction& f, const Vector& x, const Vector& r,
                                       double step, Matrix& jac) {
  jac.resize(r.size(), x.size());
  const double xs = x.cwiseAbs().maxCoeff();
  Vector xp = x, rp;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    double h = step * std::max(std::abs(x[j]), xs);
    if (h == 0.0) h = step;
    xp[j] = x[j] + h;
    h = xp[j] - x[j];
    if (!f(xp, rp) || rp.size() != r.size()) return false;
    jac.col(j) = (rp - r) / h;
    xp[j] = x[j];
  }
  return jac.allFinite();
}

inline LinearizeFunction dense_linearization(ResidualFunction f, double step) {
  return [f = std::move(f), step](const Vector& x, const Vector& r, Linearization& lin) {
    lin.jtj.resize(0, 0);
    if (!finite_difference_jacobian(f, x, r, step, lin.jacobian)) return false;
    lin.jtr = lin.jacobian.transpose() * r;
    return true;
  };
}

inline LinearizeFunction analytic_linearization(std::function<Matrix(const Vector&)> jacobian) {
  return [jacobian = std::move(jacobian)](const Vector& x, const Vector& r, Linearization& lin) {
    lin.jacobian = jacobian(x);
    lin.jtj.resize(0, 0);
    lin.jtr = lin.jacobian.transpose() * r;
    return lin.jacobian.allFinite();
  };
}

namespace detail {

inline Vector gauss_newton_step(const Linearization& lin, const Vector& r) {
  if (lin.jacobian.size() > 0) return lin.jacobian.colPivHouseholderQr().solve(-r);
  return lin.jtj.ldlt().solve(-lin.jtr);
}

inline Vector damped_step(const Matrix& jtj, const Vector& jtr, double lambda) {
  Matrix a = jtj;
  const Vector d = jtj.diagonal().cwiseMax(std::numeric_limits<double>::min());
  a.diagonal() += lambda * d;
  return a.ldlt().solve(-jtr);
}

}  // namespace detail

struct LeastSquaresResult {
  Vector x;
  LeastSquaresReport report;
};

inline LeastSquaresResult gauss_newton_solve(const ResidualFunction& residual, const Vector& x0,
                                             const LeastSquaresSettings& settings,
                                             const LinearizeFunction& linearize) {
  settings.validate();
  LeastSquaresResult out{x0, {}};
  auto& rep = out.report;
  Vector& x = out.x;
  Vector r, r_trial;
  if (!residual(x, r) || !r.allFinite()) {
    rep.reason = StopReason::NonFinite;
    return out;
  }
  double rnorm = r.norm();
  rep.residual_norms.push_back(rnorm);
  double lambda = settings.initial_damping;
  Linearization lin;

  for (;;) {
    if (!linearize(x, r, lin)) {
      rep.reason = StopReason::NonFinite;
      return out;
    }
    rep.gradient_norm = lin.jtr.norm();
    if (rep.gradient_norm <= settings.gradient_tolerance) {
      rep.reason = StopReason::Gradient;
      return out;
    }
    if (rep.iterations >= settings.max_iterations) {
      rep.reason = StopReason::MaxIterations;
      return out;
    }

    auto try_step = [&](const Vector& dx) {
      if (!dx.allFinite()) return false;
      const Vector xt = x + dx;
      if (!residual(xt, r_trial) || !r_trial.allFinite()) return false;
      const double tn = r_trial.norm();
      if (!(tn < rnorm)) return false;
      x = xt;
      r.swap(r_trial);
      rnorm = tn;
      return true;
    };
    auto small = [&](const Vector& dx) {
      return dx.norm() <= settings.step_tolerance * (settings.step_tolerance + x.norm());
    };

    const Vector dx = detail::gauss_newton_step(lin, r);
    bool accepted = try_step(dx);
    if (!accepted && dx.allFinite() && small(dx)) {
      rep.reason = StopReason::Step;
      return out;
    }
    Vector last = dx;
    if (!accepted && settings.damping) {
      if (lin.jtj.size() == 0) lin.jtj = lin.jacobian.transpose() * lin.jacobian;
      for (int a = 0; a < settings.max_damping_attempts && !accepted; ++a) {
        last = detail::damped_step(lin.jtj, lin.jtr, lambda);
        accepted = try_step(last);
        lambda = accepted ? std::max(lambda / 10.0, 1e-12) : lambda * 10.0;
      }
    }
    if (!accepted) {
      rep.reason = StopReason::Stalled;
      return out;
    }
    ++rep.iterations;
    rep.residual_norms.push_back(rnorm);
    if (small(last)) {
      // the gradient test takes precedence when it also holds at the new point
      if (!linearize(x, r, lin)) {
        rep.reason = StopReason::NonFinite;
        return out;
      }
      rep.gradient_norm = lin.jtr.norm();
      rep.reason = rep.gradient_norm <= settings.gradient_tolerance ? StopReason::Gradient : StopReason::Step;
      return out;
    }
  }
}

inline LeastSquaresResult gauss_newton_solve(const ResidualFunction& residual, const Vector& x0,
                                             const LeastSquaresSettings& settings = {}) {
  return gauss_newton_solve(residual, x0, settings, dense_linearization(residual, settings.fd_step));
}

}  // namespace eulerrom
