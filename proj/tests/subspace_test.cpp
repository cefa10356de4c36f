#include "support.hpp"

namespace gfda {
namespace {

Matrix autocorrelation(const Matrix& x) { return x * x.transpose() / static_cast<double>(x.cols()); }

TEST(FitClass, MatchesDirectAutocorrelationEigenproblem) {
  const Matrix x = test::random_matrix(1, 8, 20) + 2.0 * Matrix::Ones(8, 20);
  const ClassModel m = fit_class("a", x, FixedDim{3});
  Eigen::SelfAdjointEigenSolver<Matrix> oracle(autocorrelation(x));
  for (Index i = 0; i < 3; ++i) {
    EXPECT_NEAR(m.eigenvalues(i), oracle.eigenvalues()(7 - i), 1e-12 * oracle.eigenvalues()(7));
    EXPECT_NEAR(std::abs(m.basis.column(i).dot(oracle.eigenvectors().col(7 - i))), 1.0, 1e-10);
  }
  EXPECT_GT(m.first_basis().dot(m.mean), 0.0);
  EXPECT_EQ(m.count, 20);
}

TEST(FitClass, AutocorrelationIsCovariancePlusMeanOuter) {
  const Matrix x = test::random_matrix(2, 6, 15).array() + 0.5;
  const ClassModel m = fit_class("a", x, FixedDim{1});
  const Matrix r = m.spectrum_basis.matrix() * m.spectrum.asDiagonal() * m.spectrum_basis.matrix().transpose();
  const Matrix centered = x.colwise() - x.rowwise().mean();
  const Matrix cov = centered * centered.transpose() / 15.0;
  EXPECT_LT(test::rel_error(r, cov + m.mean * m.mean.transpose()), 1e-12);
}

TEST(FitClass, DimensionRules) {
  const Matrix x = test::random_matrix(3, 5, 4);
  EXPECT_THROW(fit_class("a", x, FixedDim{0}), ValidationError);
  EXPECT_THROW(fit_class("a", x, FixedDim{5}), ValidationError);
  EXPECT_EQ(fit_class("a", x, FixedDim{4}).dim(), 4);
  EXPECT_EQ(fit_class("a", x, EnergyThreshold{1.0}).dim(), 4);
  const ClassModel e = fit_class("a", x, EnergyThreshold{0.5});
  EXPECT_GE(e.eigenvalues.sum(), 0.5 * e.spectrum.sum() * (1 - 1e-12));
  EXPECT_LT(e.eigenvalues.head(e.dim() - 1).sum(), 0.5 * e.spectrum.sum());
}

TEST(FitClass, RankDeficientTruncatesWithWarning) {
  Matrix x(4, 3);
  x.col(0) = Eigen::Vector4d(1, 0, 0, 0);
  x.col(1) = Eigen::Vector4d(1, 0, 0, 0);
  x.col(2) = Eigen::Vector4d(0, 1, 0, 0);
  const ClassModel m = fit_class("a", x, FixedDim{3});
  EXPECT_EQ(m.dim(), 2);
  EXPECT_FALSE(m.warnings.empty());
}

TEST(FitClass, RejectsBadInput) {
  EXPECT_THROW(fit_class("a", Matrix(3, 0)), ValidationError);
  EXPECT_THROW(fit_class("a", Matrix::Zero(3, 2)), ValidationError);
  Matrix x = Matrix::Ones(3, 2);
  x(1, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(fit_class("a", x), ValidationError);
}

TEST(FitClass, SingleSampleGivesItsDirection) {
  const Vector x = Eigen::Vector3d(3, -4, 0);
  const ClassModel m = fit_class("a", x);
  EXPECT_LT((m.first_basis() - x / 5.0).norm(), 1e-15);
  EXPECT_NEAR(m.eigenvalues(0), 25.0, 1e-12);
}

TEST(ProjectionMatrix, IdempotentWithTraceN) {
  const ClassModel c = class_from_basis("a", OrthoBasis(test::random_orthonormal(4, 9, 3)));
  const Matrix p = projection_matrix(c).matrix();
  EXPECT_LT((p * p - p).norm(), 1e-14);
  EXPECT_NEAR(p.trace(), 3.0, 1e-14);
}

TEST(Ensemble, Validation) {
  const auto a = class_from_basis("a", OrthoBasis(test::random_orthonormal(5, 6, 2)));
  const auto b = class_from_basis("b", OrthoBasis(test::random_orthonormal(6, 6, 2)));
  const auto wrong = class_from_basis("c", OrthoBasis(test::random_orthonormal(7, 5, 2)));
  EXPECT_THROW(SubspaceEnsemble({a}), ValidationError);
  EXPECT_THROW(SubspaceEnsemble({a, a}), ValidationError);
  EXPECT_THROW(SubspaceEnsemble({a, wrong}), ValidationError);
  const SubspaceEnsemble e({a, b});
  EXPECT_EQ(e.total_dim(), 4);
  EXPECT_EQ(e.pooled_basis().cols(), 4);
}

TEST(Ensemble, OrientsBareFirstBasesTowardFirstClass) {
  Matrix u(2, 1), v(2, 1);
  u << 1, 0;
  v << -0.6, -0.8;
  const SubspaceEnsemble e({class_from_basis("a", OrthoBasis(u)), class_from_basis("b", OrthoBasis(v))});
  EXPECT_GT(e[0].first_basis().dot(e[1].first_basis()), 0.0);
}

TEST(SumSpaceEig, SpectrumOfG) {
  const SubspaceEnsemble e = synth::subspace_config(4, 3, 20, 1.0, 8);
  const SumSpaceEig s = sum_space_eig(e.pooled_basis());
  EXPECT_EQ(s.values.size(), 12);
  EXPECT_NEAR(s.values.sum(), 12.0, 1e-12);
  EXPECT_GT(s.values.minCoeff(), 0.0);
  EXPECT_LE(s.values.maxCoeff(), 4.0 + 1e-12);
  const Matrix g = SymMatrix::outer(e.pooled_basis()).matrix();
  for (Index i = 0; i < 12; ++i) {
    EXPECT_LT((g * s.vectors.column(i) - s.values(i) * s.vectors.column(i)).norm(), 1e-12);
  }
}

TEST(DifferenceSubspace, SixtyDegreeLines) {
  Matrix u(2, 1), v(2, 1);
  u << 1, 0;
  v << 0.5, std::sqrt(3.0) / 2.0;
  const DifferenceSubspace ds = difference_subspace_analytic(OrthoBasis(u), OrthoBasis(v));
  ASSERT_EQ(ds.eigenvalues.size(), 2);
  EXPECT_NEAR(ds.eigenvalues(0), 0.5, 1e-12);
  EXPECT_NEAR(ds.eigenvalues(1), 1.5, 1e-12);
  const OrthoBasis geo = difference_subspace_geometric(OrthoBasis(u), OrthoBasis(v));
  EXPECT_NEAR(std::abs(geo.column(0).dot(ds.difference.column(0))), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(geo.column(0).dot((v - u).col(0).normalized())), 1.0, 1e-12);
}

TEST(DifferenceSubspace, EigenvaluesAreOnePlusMinusCosines) {
  const OrthoBasis a(test::random_orthonormal(9, 10, 3)), b(test::random_orthonormal(10, 10, 3));
  const DifferenceSubspace ds = difference_subspace_analytic(a, b);
  const Vector cos = test::cosines_by_eig(a.matrix(), b.matrix());
  ASSERT_EQ(ds.difference.dim(), 3);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(ds.eigenvalues(i), 1.0 - cos(i), 1e-10);
}

TEST(DifferenceSubspace, ConstructionsAgreeOnRandomPairs) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Index m = 1 + static_cast<Index>(seed % 3), n = 1 + static_cast<Index>((seed / 3) % 3);
    const OrthoBasis a(test::random_orthonormal(2 * seed + 1, 15, m));
    const OrthoBasis b(test::random_orthonormal(2 * seed + 2, 15, n));
    const OrthoBasis geo = difference_subspace_geometric(a, b);
    const DifferenceSubspace ana = difference_subspace_analytic(a, b);
    ASSERT_EQ(geo.dim(), ana.difference.dim()) << "seed " << seed;
    EXPECT_GE(test::span_agreement(geo.matrix(), ana.difference.matrix()), 1.0 - 1e-8) << "seed " << seed;
    EXPECT_EQ(ana.unit_count, std::abs(m - n));
    EXPECT_TRUE(ana.warnings.empty());
  }
}

TEST(DifferenceSubspace, OverlapIsReported) {
  Matrix u = Matrix::Zero(3, 2), v = Matrix::Zero(3, 2);
  u(0, 0) = 1;
  u(1, 1) = 1;
  v(0, 0) = 1;
  v(2, 1) = 1;
  EXPECT_THROW(difference_subspace_geometric(OrthoBasis(u), OrthoBasis(v)), DegenerateError);
  // Shared e1 gives eigenvalue 2; the orthogonal pair (e2, e3) gives two 1s.
  EXPECT_THROW(difference_subspace_analytic(OrthoBasis(u), OrthoBasis(v)), DegenerateError);

  Matrix w = Matrix::Zero(4, 2), z = Matrix::Zero(4, 2);
  w(0, 0) = 1;
  w(1, 1) = 1;
  z(0, 0) = 0.8;
  z(2, 0) = 0.6;
  z(3, 1) = 1;
  const DifferenceSubspace partial = difference_subspace_analytic(OrthoBasis(w), OrthoBasis(z));
  EXPECT_EQ(partial.difference.dim(), 1);
  EXPECT_EQ(partial.unit_count, 2);
  EXPECT_FALSE(partial.warnings.empty());
}

}  // namespace
}  // namespace gfda
