#include "support.hpp"

#include "gfda/gds.hpp"

namespace gfda {
namespace {

TEST(Gds, TwoLinesEqualDifferenceSubspace) {
  Matrix u(3, 1), v(3, 1);
  u << 1, 0, 0;
  v << 0.5, 0.5, std::sqrt(0.5);
  const SubspaceEnsemble e({class_from_basis("a", OrthoBasis(u)), class_from_basis("b", OrthoBasis(v))});
  const GdsModel g = gds(e, FixedCount{1});
  const DifferenceSubspace ds = difference_subspace_analytic(OrthoBasis(u), OrthoBasis(v));
  EXPECT_NEAR(std::abs(g.basis.column(0).dot(ds.difference.column(0))), 1.0, 1e-12);
  EXPECT_NEAR(g.eigenvalues(0), 0.5, 1e-12);
}

TEST(Gds, TwoClassSpanMatchesDifferenceSubspace) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SubspaceEnsemble e = synth::subspace_config(2, 3, 15, 1.0, seed);
    const DifferenceSubspace ds = difference_subspace_analytic(e[0], e[1]);
    const GdsModel g = gds(e, FixedCount{ds.difference.dim()});
    EXPECT_GE(test::span_agreement(g.basis.matrix(), ds.difference.matrix()), 1.0 - 1e-8);
  }
}

TEST(Gds, OrthogonalClassesHaveUnitSpectrum) {
  const Matrix eye = Matrix::Identity(4, 4);
  std::vector<ClassModel> models;
  for (Index c = 0; c < 3; ++c) models.push_back(class_from_basis("c" + std::to_string(c), OrthoBasis(eye.col(c))));
  const GdsModel g = gds(SubspaceEnsemble(models), FixedCount{2});
  EXPECT_LT((g.eigenvalues - Vector::Ones(2)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(g.basis.dim(), 2);
}

TEST(Gds, PowerRuleReachesBeta) {
  const SubspaceEnsemble e = synth::subspace_config(5, 3, 60, 1.0, 3);
  const GdsModel g = gds(e, PowerThreshold{0.90});
  ASSERT_TRUE(g.selection.beta.has_value());
  EXPECT_DOUBLE_EQ(*g.selection.beta, 18.0);
  EXPECT_GE(g.selection.achieved_power, 18.0);
  double without_last = g.selection.achieved_power - g.power.back();
  EXPECT_LT(without_last, 18.0);

  // Power of each direction against an independent evaluation of f_g.
  const ScatterPair pair = scatter_ladder(e, Rung::gFDA);
  const auto curve = discriminant_power_curve(g.basis, pair);
  for (std::size_t i = 0; i < curve.size(); ++i) EXPECT_NEAR(curve[i], g.power[i], 1e-9);
}

TEST(Gds, FullPowerEqualsCTimesCMinusOne) {
  const SubspaceEnsemble e = synth::subspace_config(4, 2, 30, 1.0, 4);
  const GdsModel g = gds(e, FixedCount{8});
  EXPECT_NEAR(g.selection.achieved_power, 12.0, 1e-9);
}

TEST(Gds, BasisVectorsAreEigenvectorsOfG) {
  const SubspaceEnsemble e = synth::subspace_config(6, 2, 40, 1.0, 5);
  const GdsModel g = gds(e, FixedCount{7});
  const Matrix gm = sum_matrix(e).matrix();
  for (Index i = 0; i < 7; ++i) {
    EXPECT_LT((gm * g.basis.column(i) - g.eigenvalues(i) * g.basis.column(i)).norm(), 1e-8);
  }
  for (Index i = 1; i < 7; ++i) EXPECT_LE(g.eigenvalues(i - 1), g.eigenvalues(i));
}

TEST(Gds, RejectsBadRules) {
  const SubspaceEnsemble e = synth::subspace_config(3, 2, 20, 1.0, 6);
  EXPECT_THROW(gds(e, FixedCount{0}), ValidationError);
  EXPECT_THROW(gds(e, FixedCount{7}), ValidationError);
  EXPECT_THROW(gds(e, PowerThreshold{0.0}), ValidationError);
  EXPECT_THROW(gds(e, PowerThreshold{1.5}), ValidationError);
  EXPECT_NO_THROW(gds(e, PowerThreshold{1.0}));
}

TEST(Gds, ModelReferencesAreProjectedFirstBases) {
  const SubspaceEnsemble e = synth::subspace_config(3, 2, 20, 1.0, 7);
  const DiscriminantModel m = gds_model(e, FixedCount{3});
  EXPECT_EQ(m.method, Method::GDS);
  EXPECT_LT((m.class_refs - m.basis.matrix().transpose() * e.first_basis_matrix()).norm(), 1e-15);
}

TEST(SumMatrix, SpectrumBoundsAndTrace) {
  for (Index c = 2; c <= 6; ++c) {
    const SubspaceEnsemble e = synth::subspace_config(c, 2, 3 * c, 0.5, static_cast<std::uint64_t>(c));
    const Matrix g = sum_matrix(e).matrix();
    EXPECT_EQ((g - g.transpose()).norm(), 0.0);
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(g).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1e-12);
    EXPECT_LE(ev.maxCoeff(), static_cast<double>(c) + 1e-12);
    EXPECT_NEAR(g.trace(), 2.0 * static_cast<double>(c), 1e-12);
  }
}

TEST(GdsDecomposition, ReconstructsG) {
  for (Index c = 2; c <= 8; ++c) {
    for (Index n = 1; n <= 4; ++n) {
      const SubspaceEnsemble e = synth::subspace_config(c, n, 4 * c * n, 1.0, static_cast<std::uint64_t>(c * 7 + n));
      const GdsDecomposition d = gds_decomposition(e);
      const Matrix g = sum_matrix(e).matrix();
      EXPECT_LE((d.between_term.matrix() + d.within.matrix() - g).norm(), 1e-10 * g.norm());

      // Ĝ carries the weight 1/(2(C−1)) − 1/C on Σ_B3 over the same Σ_W5.
      const double cd = static_cast<double>(c);
      const Matrix b3 = first_basis_scatter(e).matrix();
      const Matrix g_hat = g - b3 / cd;
      const Matrix rebuilt = (1.0 / (2.0 * (cd - 1.0)) - 1.0 / cd) * b3 + d.within.matrix();
      EXPECT_LE((rebuilt - g_hat).norm(), 1e-10 * g_hat.norm());
    }
  }
}

TEST(GdsDecomposition, TwoLines) {
  Matrix u(2, 1), v(2, 1);
  u << 1, 0;
  v << 0.8, 0.6;
  const SubspaceEnsemble e({class_from_basis("a", OrthoBasis(u)), class_from_basis("b", OrthoBasis(v))});
  const GdsDecomposition d = gds_decomposition(e);
  const Vector z = (u - v).col(0), zp = (u + v).col(0);
  EXPECT_LT((d.between_term.matrix() - 0.5 * z * z.transpose()).norm(), 1e-15);
  EXPECT_LT((d.within.matrix() - 0.5 * zp * zp.transpose()).norm(), 1e-15);
}

TEST(GdsDecomposition, PairIdentity) {
  const Matrix b = test::random_orthonormal(8, 6, 2);
  const Vector p = b.col(0), q = b.col(1) * 0.3 + b.col(0) * 0.7;
  const Vector z = p - q, zp = p + q;
  const Matrix lhs = z * z.transpose() + zp * zp.transpose();
  EXPECT_LT((lhs - 2.0 * (p * p.transpose() + q * q.transpose())).norm(), 1e-14);
}

TEST(GdsDecomposition, UnequalDimensionsRejected) {
  const SubspaceEnsemble e({class_from_basis("a", OrthoBasis(test::random_orthonormal(1, 6, 1))),
                            class_from_basis("b", OrthoBasis(test::random_orthonormal(2, 6, 2)))});
  EXPECT_THROW(gds_decomposition(e), ValidationError);
}

}  // namespace
}  // namespace gfda
