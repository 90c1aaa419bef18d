#include <gtest/gtest.h>

#include "eulerrom/euler.hpp"
#include "support/generators.hpp"
#include "support/jacobian_fd.hpp"

using namespace eulerrom;
using eulerrom::testing::Generator;
using eulerrom::testing::fd_dU_dV;
using eulerrom::testing::fd_dV_dU;
using eulerrom::testing::fd_step;

namespace {

template <int Dim>
double rel_err(const StateVector<Dim>& a, const StateVector<Dim>& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace

TEST(Pressure, HandEvaluatedStates) {
  const GasModel gas;
  EXPECT_DOUBLE_EQ(pressure<1>(StateVector<1>(1.0, 0.0, 2.5), gas), 1.0);
  EXPECT_EQ(pressure<1>(StateVector<1>(1.0, 0.0, 0.0), gas), 0.0);
  EXPECT_NEAR(pressure<1>(StateVector<1>(1.225, 0.0, 354637.5), gas), 141855.0, 1e-8);
}

TEST(Pressure, RejectsNonFiniteAndNonPositiveDensity) {
  const GasModel gas;
  EXPECT_THROW(pressure<1>(StateVector<1>(NAN, 0.0, 1.0), gas), std::invalid_argument);
  EXPECT_THROW(pressure<1>(StateVector<1>(0.0, 0.0, 1.0), gas), InadmissibleStateError);
}

TEST(EntropyVariables, HandEvaluatedRestState) {
  const GasModel gas;
  const auto v1 = conserved_to_entropy<1>(StateVector<1>(1.0, 0.0, 2.5), gas);
  EXPECT_NEAR(v1[0], 3.5, 1e-14);
  EXPECT_EQ(v1[1], 0.0);
  EXPECT_NEAR(v1[2], -1.0, 1e-15);
  const auto v2 = conserved_to_entropy<2>(StateVector<2>(1.0, 0.0, 0.0, 2.5), gas);
  EXPECT_NEAR((v2 - StateVector<2>(3.5, 0.0, 0.0, -1.0)).norm(), 0.0, 1e-14);
  const auto u = entropy_to_conserved<1>(StateVector<1>(3.5, 0.0, -1.0), gas);
  EXPECT_NEAR((u - StateVector<1>(1.0, 0.0, 2.5)).norm(), 0.0, 1e-14);
}

TEST(EntropyVariables, ZeroEntropyIdentity) {
  // s = 0 when p = rho^gamma
  const GasModel gas;
  Generator g(7);
  for (int i = 0; i < 50; ++i) {
    const double rho = g.uniform(0.2, 5.0);
    const double p = std::pow(rho, gas.gamma);
    const auto u = from_primitive<1>(rho, Eigen::Matrix<double, 1, 1>(g.uniform(-1, 1)), p, gas);
    const auto v = conserved_to_entropy<1>(u, gas);
    EXPECT_NEAR(v[0], (gas.gamma + 1) / (gas.gamma - 1) - u[2] / p, 1e-12 * std::abs(v[0]) + 1e-13);
  }
}

TEST(EntropyVariables, RejectsNonNegativeLastComponent) {
  const GasModel gas;
  EXPECT_THROW(entropy_to_conserved<1>(StateVector<1>(3.5, 0.0, 0.0), gas), InadmissibleStateError);
  EXPECT_THROW(entropy_to_conserved<2>(StateVector<2>(3.5, 0.0, 0.0, 0.3), gas), InadmissibleStateError);
  EXPECT_THROW(conserved_to_entropy<1>(StateVector<1>(1.0, 0.0, 0.0), gas), InadmissibleStateError);
}

TEST(EntropyVariables, RoundTripProperty) {
  Generator g(11);
  const GasModel unit;
  const GasModel scaled{1.4, 1.225, 1.225 * 340.29 * 340.29};
  for (int i = 0; i < 200; ++i) {
    const auto u1 = g.admissible_state<1>(unit);
    EXPECT_LT(rel_err<1>(entropy_to_conserved<1>(conserved_to_entropy<1>(u1, unit), unit), u1), 1e-12);
    const auto u2 = g.admissible_state<2>(scaled);
    EXPECT_LT(rel_err<2>(entropy_to_conserved<2>(conserved_to_entropy<2>(u2, scaled), scaled), u2), 1e-12);
  }
}

TEST(EntropyVariables, ReferenceScalingIsExact) {
  // With references (rho_inf, rho_inf a_inf^2) a dimensional state has the same
  // V_1 as its non-dimensional image; the other slots scale by 1/a_inf, 1/a_inf^2.
  const double rho_inf = 1.225, a_inf = 340.29;
  const GasModel nd{1.4, 1.0, 1.0};
  const GasModel dim{1.4, rho_inf, rho_inf * a_inf * a_inf};
  Generator g(3);
  for (int i = 0; i < 50; ++i) {
    const auto u = g.admissible_state<2>(nd);
    const StateVector<2> scale(rho_inf, rho_inf * a_inf, rho_inf * a_inf, rho_inf * a_inf * a_inf);
    const StateVector<2> ud = u.cwiseProduct(scale);
    const auto vn = conserved_to_entropy<2>(u, nd);
    const auto vd = conserved_to_entropy<2>(ud, dim);
    EXPECT_NEAR(vd[0], vn[0], 1e-12 * std::abs(vn[0]) + 1e-12);
    EXPECT_NEAR(vd[1] * a_inf, vn[1], 1e-12 * std::abs(vn[1]) + 1e-14);
    EXPECT_NEAR(vd[3] * a_inf * a_inf, vn[3], 1e-12 * std::abs(vn[3]));
  }
}

TEST(EntropyJacobian, MatchesFiniteDifferencesAtRestState) {
  const GasModel gas;
  const StateVector<1> u(1.0, 0.0, 2.5);
  const auto a = entropy_jacobian<1>(u, gas);
  EXPECT_LT((a - fd_dU_dV<1>(u, gas)).norm() / a.norm(), 1e-6);
  EXPECT_LT((entropy_jacobian_inverse<1>(u, gas) - fd_dV_dU<1>(u, gas)).norm() /
                entropy_jacobian_inverse<1>(u, gas).norm(),
            1e-6);
}

TEST(EntropyJacobian, SymmetricPositiveDefiniteInversePairProperty) {
  Generator g(5);
  const GasModel gas;
  for (int i = 0; i < 100; ++i) {
    const auto u = g.admissible_state<2>(gas);
    const auto a = entropy_jacobian<2>(u, gas);
    const auto at = entropy_jacobian_inverse<2>(u, gas);
    EXPECT_LT((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
    EXPECT_EQ(Eigen::LLT<StateMatrix<2>>(a).info(), Eigen::Success);
    EXPECT_EQ(Eigen::LLT<StateMatrix<2>>(at).info(), Eigen::Success);
    EXPECT_LT((a * at - StateMatrix<2>::Identity()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((a - fd_dU_dV<2>(u, gas)).norm() / a.norm(), 1e-5);
    EXPECT_LT((at - fd_dV_dU<2>(u, gas)).norm() / at.norm(), 1e-5);
  }
}

TEST(EntropyJacobian, RejectsInadmissibleState) {
  EXPECT_THROW(entropy_jacobian<1>(StateVector<1>(1.0, 0.0, -1.0), GasModel{}), InadmissibleStateError);
}

TEST(Flux, HandEvaluated) {
  const GasModel gas;
  const auto f0 = analytic_flux<1>(StateVector<1>(1.0, 0.0, 2.5), 0, gas);
  EXPECT_NEAR((f0 - StateVector<1>(0.0, 1.0, 0.0)).norm(), 0.0, 1e-15);
  const auto f1 = analytic_flux<1>(StateVector<1>(1.0, 1.0, 3.0), 0, gas);
  EXPECT_NEAR((f1 - StateVector<1>(1.0, 2.0, 4.0)).norm(), 0.0, 1e-14);
  EXPECT_THROW(analytic_flux<1>(StateVector<1>(1.0, 1.0, 3.0), 1, gas), std::out_of_range);
}

TEST(Flux, TwoDimensionalAxesAreMirrorImages) {
  const GasModel gas;
  Generator g(9);
  for (int i = 0; i < 20; ++i) {
    const auto u = g.admissible_state<2>(gas);
    const StateVector<2> swapped(u[0], u[2], u[1], u[3]);
    const auto fx = analytic_flux<2>(u, 0, gas);
    const auto fy = analytic_flux<2>(swapped, 1, gas);
    EXPECT_LT((fx - StateVector<2>(fy[0], fy[2], fy[1], fy[3])).norm(), 1e-12 * fx.norm());
  }
}

TEST(WaveSpeed, HandEvaluated) {
  const GasModel gas;
  EXPECT_NEAR(max_wave_speed<1>(StateVector<1>(1.0, 0.0, 2.5), 0, gas), std::sqrt(1.4), 1e-15);
  const StateVector<2> rest(1.0, 0.0, 0.0, 2.5);
  EXPECT_EQ(max_wave_speed<2>(rest, 0, gas), max_wave_speed<2>(rest, 1, gas));
  const auto sod = from_primitive<1>(1.225, Eigen::Matrix<double, 1, 1>(0.0), 101325.0, gas);
  EXPECT_NEAR(max_wave_speed<1>(sod, 0, gas), std::sqrt(1.4 * 101325.0 / 1.225), 1e-10);
  EXPECT_NEAR(max_wave_speed<1>(sod, 0, gas), 340.29, 0.01);
}

namespace {

template <int Dim, class F>
StateMatrix<Dim> fd_state_jacobian(const StateVector<Dim>& u, F&& f) {
  StateMatrix<Dim> j;
  for (int c = 0; c < Dim + 2; ++c) {
    const double h = fd_step(u[c], u.norm());
    StateVector<Dim> up = u, um = u;
    up[c] += h;
    um[c] -= h;
    j.col(c) = (f(up) - f(um)) / (2 * h);
  }
  return j;
}

template <int Dim>
void check_flux_jacobian(Generator& g) {
  const GasModel gas;
  for (int trial = 0; trial < 200; ++trial) {
    const StateVector<Dim> u = g.admissible_state<Dim>(gas);
    for (int axis = 0; axis < Dim; ++axis) {
      const StateMatrix<Dim> j = flux_jacobian<Dim>(u, axis, gas);
      const StateMatrix<Dim> fd =
          fd_state_jacobian<Dim>(u, [&](const StateVector<Dim>& x) { return analytic_flux<Dim>(x, axis, gas); });
      // columns scale like 1 / u_c, so compare column by column
      for (int c = 0; c < Dim + 2; ++c) {
        EXPECT_LT((j.col(c) - fd.col(c)).norm(), 1e-6 * fd.col(c).norm() + 1e-12 * fd.norm());
      }
      // the Euler flux is homogeneous of degree one: F(U) = (dF/dU) U
      EXPECT_LT(rel_err<Dim>(j * u, analytic_flux<Dim>(u, axis, gas)), 1e-12);
    }
  }
}

}  // namespace

TEST(FluxJacobian, MatchesFiniteDifferencesAndHomogeneityProperty) {
  Generator g(21);
  check_flux_jacobian<1>(g);
  check_flux_jacobian<2>(g);
}

TEST(WaveSpeed, GradientMatchesFiniteDifferencesProperty) {
  Generator g(22);
  const GasModel gas;
  for (int trial = 0; trial < 200; ++trial) {
    const StateVector<2> u = g.admissible_state<2>(gas);
    for (int axis = 0; axis < 2; ++axis) {
      if (std::abs(u[1 + axis]) < 1e-3 * u.norm()) continue;  // |u_n| kink
      const StateVector<2> grad = max_wave_speed_gradient<2>(u, axis, gas);
      for (int c = 0; c < 4; ++c) {
        // a larger step than fd_step: the speed mixes components of very different size
        const double h = 1e-5 * std::abs(u[c]) + 1e-8 * u.norm();
        StateVector<2> up = u, um = u;
        up[c] += h;
        um[c] -= h;
        const double fd = (max_wave_speed<2>(up, axis, gas) - max_wave_speed<2>(um, axis, gas)) / (2 * h);
        EXPECT_NEAR(grad[c], fd, 1e-6 * std::abs(fd) + 1e-9 * grad.norm());
      }
    }
  }
}
