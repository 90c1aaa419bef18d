#include <gtest/gtest.h>

#include "eulerrom/inner_products.hpp"
#include "support/generators.hpp"

using namespace eulerrom;
using eulerrom::testing::Generator;

namespace {

InnerProductSpec spec_of(InnerProductKind kind, Vector ref = {}, GasModel gas = {}) {
  return InnerProductSpec{kind, ReferenceState{std::move(ref)}, gas};
}

WeightOperator random_entropy_weight(Generator& g, int cells, double vol) {
  const Vector u = g.admissible_state<2>();
  return WeightOperator(spec_of(InnerProductKind::EntropyAtilde, u), 2, cells, vol);
}

}  // namespace

TEST(Reference, L2StarScalesFromConfiguration) {
  const auto nd = reference_for_l2star(preset(ProblemKind::KelvinHelmholtz, false));
  EXPECT_LT((nd.values - Vector::Ones(4)).cwiseAbs().maxCoeff(), 1e-15);
  const auto cfg = preset(ProblemKind::KelvinHelmholtz, true);
  const auto dim = reference_for_l2star(cfg);
  const double a = cfg.a_inf();
  EXPECT_NEAR(a, 340.3, 0.02);
  EXPECT_DOUBLE_EQ(dim.values[0], 1.225);
  EXPECT_DOUBLE_EQ(dim.values[1], 1.225 * a);
  EXPECT_DOUBLE_EQ(dim.values[2], 1.225 * a);
  EXPECT_DOUBLE_EQ(dim.values[3], 1.225 * a * a);
  EXPECT_EQ(reference_for_l2star(preset(ProblemKind::Sod, false)).values.size(), 3);
}

TEST(Reference, SnapshotMeans) {
  const GasModel gas;
  const Vector u = from_primitive<1>(1.3, Eigen::Matrix<double, 1, 1>(0.2), 0.9, gas);
  Matrix one(6, 1), two(6, 2);
  one << u, u;
  two << one, one;
  for (auto kind : {InnerProductKind::EntropyA, InnerProductKind::EntropyAtilde}) {
    const auto a = reference_from_snapshots(one, 1, kind, gas);
    const auto b = reference_from_snapshots(two, 1, kind, gas);
    EXPECT_LT((a.values - b.values).norm(), 1e-15 * a.values.norm());
  }
  EXPECT_LT((reference_from_snapshots(one, 1, InnerProductKind::EntropyAtilde, gas).values - u).norm(), 1e-15);
  EXPECT_THROW(reference_from_snapshots(one, 1, InnerProductKind::L2, gas), std::invalid_argument);
}

TEST(Reference, SodEntropyReferenceIsSpd) {
  const auto cfg = preset(ProblemKind::Sod, false);
  const auto snaps = run_fom(cfg);
  const auto w = build_weight(make_inner_product_spec(InnerProductKind::EntropyA, cfg, snaps.data), cfg);
  EXPECT_EQ(Eigen::LLT<Matrix>(w.block()).info(), Eigen::Success);
}

TEST(Weight, BlocksPerKind) {
  const WeightOperator l2(spec_of(InnerProductKind::L2), 1, 10, 0.1);
  EXPECT_TRUE(l2.block().isApprox(0.1 * Matrix::Identity(3, 3), 1e-15));
  const WeightOperator star(spec_of(InnerProductKind::L2Star, Vector::Ones(3)), 1, 10, 0.1);
  EXPECT_TRUE((star.block().array() == l2.block().array()).all());  // bit-level
  const StateVector<1> u(1.0, 0.0, 2.5);
  const WeightOperator ea(spec_of(InnerProductKind::EntropyA, conserved_to_entropy<1>(u, GasModel{})), 1, 10, 0.1);
  EXPECT_LT((ea.block() / 0.1 - entropy_jacobian<1>(u, GasModel{})).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((ea.block() - ea.block().transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Weight, RejectsBadReferences) {
  EXPECT_THROW(WeightOperator(spec_of(InnerProductKind::L2Star, Vector::Ones(2)), 1, 10, 0.1), std::invalid_argument);
  EXPECT_THROW(WeightOperator(spec_of(InnerProductKind::L2Star, Vector(Eigen::Vector3d(1, 0, 1))), 1, 10, 0.1),
               std::invalid_argument);
  EXPECT_THROW(WeightOperator(spec_of(InnerProductKind::EntropyA, Vector(Eigen::Vector3d(1, 0, 1))), 1, 10, 0.1),
               InadmissibleStateError);
  EXPECT_THROW(WeightOperator(spec_of(InnerProductKind::L2), 1, 0, 0.1), std::invalid_argument);
}

TEST(Weight, EntropyBlocksAreMutualInverses) {
  Generator g(1);
  const GasModel gas;
  for (int i = 0; i < 20; ++i) {
    const Vector u = g.admissible_state<2>(gas);
    const Vector v = conserved_to_entropy<2>(u, gas);
    const double vol = g.uniform(0.01, 2.0);
    const WeightOperator a(spec_of(InnerProductKind::EntropyA, v), 2, 3, vol);
    const WeightOperator at(spec_of(InnerProductKind::EntropyAtilde, u), 2, 3, vol);
    EXPECT_LT(((a.block() / vol) * (at.block() / vol) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Inner, UnitConstantHasUnitNorm) {
  const auto mesh = uniform_mesh<1>(40, -0.5, 0.5, BoundaryKind::ZeroGradient);
  const auto w = build_weight(spec_of(InnerProductKind::L2), mesh);
  Vector u = Vector::Zero(mesh.field_size());
  for (int c = 0; c < 40; ++c) u[3 * c] = 1.0;
  EXPECT_NEAR(w.norm(u), 1.0, 1e-14);
}

TEST(Inner, SymmetricPositiveCauchySchwarzProperty) {
  Generator g(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto w = random_entropy_weight(g, 7, g.uniform(0.1, 1.0));
    const Vector u = g.vector(w.size()), v = g.vector(w.size());
    const double uv = inner(u, v, w), vu = inner(v, u, w);
    EXPECT_NEAR(uv, vu, 1e-12 * std::abs(uv) + 1e-15);
    EXPECT_GT(inner(u, u, w), 0.0);
    EXPECT_LE(uv * uv, inner(u, u, w) * inner(v, v, w) * (1 + 1e-12));
    // W is symmetric as an operator
    EXPECT_NEAR(u.dot(w.apply(v).col(0)), w.apply(u).col(0).dot(v), 1e-12 * std::abs(uv) + 1e-14);
  }
}

TEST(Cholesky, FactorIdentities) {
  Generator g(3);
  const WeightOperator id(spec_of(InnerProductKind::L2), 2, 5, 0.25);
  const Vector x = g.vector(id.size());
  EXPECT_LT((id.cholesky_apply(x).col(0) - 0.5 * x).norm(), 1e-15);
  for (int trial = 0; trial < 20; ++trial) {
    const auto w = random_entropy_weight(g, 5, g.uniform(0.1, 1.0));
    const Vector u = g.vector(w.size()), v = g.vector(w.size());
    EXPECT_LT((w.cholesky_solve(w.cholesky_apply(u)).col(0) - u).norm(), 1e-12 * u.norm());
    EXPECT_NEAR(w.cholesky_apply(u).col(0).dot(w.cholesky_apply(v).col(0)), inner(u, v, w),
                1e-12 * w.norm(u) * w.norm(v));
    const Matrix r = w.factor();
    EXPECT_LT((r.transpose() * r - w.block()).cwiseAbs().maxCoeff(), 1e-12 * w.block().cwiseAbs().maxCoeff());
    EXPECT_TRUE(r.isUpperTriangular());
  }
}
