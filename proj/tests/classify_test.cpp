#include "support.hpp"

#include "gfda/classify.hpp"
#include "gfda/gds.hpp"

namespace gfda {
namespace {

// EER by brute force: every pair of threshold operating points, mixed with
// the weight that equalizes the two error rates; the smallest such value.
double eer_brute_force(const std::vector<double>& g, const std::vector<double>& im) {
  std::vector<double> ts(g);
  ts.insert(ts.end(), im.begin(), im.end());
  ts.push_back(std::numeric_limits<double>::infinity());
  ts.push_back(-std::numeric_limits<double>::infinity());
  std::vector<std::pair<double, double>> pts;
  for (double t : ts) {
    double fa = 0, fr = 0;
    for (double s : im) fa += s >= t;
    for (double s : g) fr += s < t;
    pts.emplace_back(fa / static_cast<double>(im.size()), fr / static_cast<double>(g.size()));
  }
  double best = 1.0;
  for (const auto& a : pts) {
    for (const auto& b : pts) {
      const double da = a.second - a.first, db = b.second - b.first;
      if (da < 0 || db > 0) continue;
      const double w = da == db ? 0.0 : da / (da - db);
      best = std::min(best, a.first + w * (b.first - a.first));
    }
  }
  return 100.0 * best;
}

DiscriminantModel symmetric_model() {
  DiscriminantModel m;
  m.method = Method::GfdaLinear;
  m.basis = OrthoBasis(Matrix::Identity(2, 2));
  m.labels = {"plus", "minus"};
  m.class_refs.resize(2, 2);
  m.class_refs << 1, -1, 0, 0;
  return m;
}

GroupedData split(const GroupedData& d, Index from, Index count) {
  GroupedData out;
  for (const auto& c : d) out.push_back({c.label, c.samples.middleCols(from, count)});
  return out;
}

TEST(Project, BasicGeometry) {
  const DiscriminantModel m = symmetric_model();
  Matrix basis = Matrix::Zero(3, 1);
  basis(0, 0) = 1;
  DiscriminantModel one = m;
  one.basis = OrthoBasis(basis);
  one.class_refs = Matrix(1, 2);
  one.class_refs << 1, -1;
  EXPECT_EQ(project(one, Vector(Eigen::Vector3d(0, 2, 3)), false).coords.norm(), 0.0);
  EXPECT_THROW(project(one, Vector(Eigen::Vector3d(0, 2, 3)), true), UndefinedDirectionError);
  EXPECT_THROW(project(one, Vector(Eigen::Vector2d(0, 2)), false), ValidationError);
}

TEST(Project, ContractsAndNormalizes) {
  const SubspaceEnsemble e = synth::subspace_config(4, 2, 20, 1.0, 3);
  const DiscriminantModel prod = gfda_product_form(e);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Vector x = test::random_matrix(seed, 20, 1).col(0);
    const ProjectedPoint p = project(prod, x, false);
    EXPECT_LE(p.coords.norm(), (*prod.whitening * x).norm() + 1e-12);
    EXPECT_NEAR(project(prod, x, true).coords.norm(), 1.0, 1e-12);
  }
  const Vector phi = e[2].first_basis();
  const Vector ref = prod.class_refs.col(2).normalized();
  EXPECT_LT((project(prod, phi, true).coords - ref).norm(), 1e-12);
}

TEST(Classify, OwnReferenceWins) {
  const SubspaceEnsemble e = synth::subspace_config(5, 2, 30, 1.0, 4);
  for (const DiscriminantModel& m : {gfda_linear_form(e), gfda_product_form(e), gds_model(e, FixedCount{6})}) {
    for (Index c = 0; c < 5; ++c) {
      EXPECT_EQ(classify_nearest_mean(m, e[static_cast<std::size_t>(c)].first_basis()), e[static_cast<std::size_t>(c)].label);
      EXPECT_EQ(classify_cosine(m, e[static_cast<std::size_t>(c)].first_basis()), e[static_cast<std::size_t>(c)].label);
    }
  }
  const GroupedData d = test::gaussian_groups(5, 3, 6, 20, 4.0, 1.0);
  const DiscriminantModel r = reg_lda(d);
  for (const auto& c : d) EXPECT_EQ(classify_nearest_mean(r, c.samples.rowwise().mean()), c.label);
}

TEST(Classify, SymmetricReferences) {
  const DiscriminantModel m = symmetric_model();
  EXPECT_EQ(classify_nearest_mean(m, Eigen::Vector2d(0.9, 0)), "plus");
  EXPECT_EQ(classify_cosine(m, Eigen::Vector2d(0.9, 0)), "plus");
  EXPECT_EQ(classify_cosine(m, Eigen::Vector2d(-0.1, 0.5)), "minus");
}

TEST(Classify, TiesGoToSmallestLabel) {
  DiscriminantModel m = symmetric_model();
  EXPECT_EQ(classify_nearest_mean(m, Eigen::Vector2d(0, 1)), "minus");
  m.labels = {"a", "b"};
  EXPECT_EQ(classify_nearest_mean(m, Eigen::Vector2d(0, 1)), "a");
}

TEST(Classify, WellSeparatedGaussians) {
  const GroupedData d = test::gaussian_groups(6, 3, 10, 200, 8.0, 1.0);
  const GroupedData train = split(d, 0, 100), test = split(d, 100, 100);
  const DiscriminantModel m = reg_lda(train);
  EXPECT_GE(evaluate(m, test, Rule::NearestMean).recognition_rate, 99.0);
  EXPECT_GE(evaluate(m, test, Rule::Cosine).recognition_rate, 99.0);
}

TEST(Classify, NormalizationInvariants) {
  const GroupedData d = test::gaussian_groups(7, 4, 12, 30, 2.0, 1.0);
  std::vector<ClassModel> models;
  for (const auto& c : d) models.push_back(fit_class(c.label, c.samples.leftCols(10), FixedDim{2}));
  DiscriminantModel plain = gfda_linear_form(SubspaceEnsemble(models));
  DiscriminantModel normed = plain;
  normed.normalized = true;
  for (const auto& c : d) {
    for (Index j = 10; j < 30; ++j) {
      const Vector x = c.samples.col(j);
      EXPECT_EQ(classify_cosine(plain, x), classify_cosine(normed, x));
      EXPECT_EQ(classify_nearest_mean(normed, x), classify_cosine(normed, x));
    }
  }
}

TEST(Eer, ToyScores) {
  EXPECT_NEAR(eer(std::vector<double>{0.9, 0.7}, std::vector<double>{0.8, 0.2}), 25.0, 1e-12);
  EXPECT_NEAR(eer_brute_force({0.9, 0.7}, {0.8, 0.2}), 25.0, 1e-12);
  EXPECT_EQ(eer(std::vector<double>{3, 4}, std::vector<double>{1, 2}), 0.0);
  // Inverted scores: the hull runs straight from accept-all to reject-all.
  EXPECT_EQ(eer(std::vector<double>{1, 2}, std::vector<double>{3, 4}), 50.0);
  EXPECT_THROW(eer(std::vector<double>{}, std::vector<double>{1}), ValidationError);
}

TEST(Eer, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    synth::Rng rng(seed);
    std::vector<double> g, im;
    const auto ng = 1 + rng.index(12), ni = 1 + rng.index(15);
    for (std::uint64_t i = 0; i < ng; ++i) g.push_back(std::round(4.0 * (rng.normal() + 1.0)) / 4.0);
    for (std::uint64_t i = 0; i < ni; ++i) im.push_back(std::round(4.0 * rng.normal()) / 4.0);
    EXPECT_NEAR(eer(g, im), eer_brute_force(g, im), 1e-9) << "seed " << seed;
  }
}

TEST(Eer, ChanceLevel) {
  synth::Rng rng(99);
  std::vector<double> g, im;
  for (int i = 0; i < 10000; ++i) {
    g.push_back(rng.normal());
    im.push_back(rng.normal());
  }
  EXPECT_NEAR(eer(g, im), 50.0, 3.0);
}

TEST(Evaluate, ReportShape) {
  const GroupedData d = test::gaussian_groups(8, 3, 8, 20, 2.0, 1.0);
  const DiscriminantModel m = reg_lda(split(d, 0, 10));
  const EvalReport r = evaluate(m, split(d, 10, 10), Rule::NearestMean);
  EXPECT_EQ(r.total, 30);
  Index sum = 0;
  for (const auto& row : r.confusion) {
    for (Index v : row) sum += v;
  }
  EXPECT_EQ(sum, 30);
  EXPECT_EQ(r.genuine.size(), 30u);
  EXPECT_EQ(r.impostor.size(), 60u);
  ASSERT_TRUE(r.eer.has_value());
  EXPECT_GE(*r.eer, 0.0);
  EXPECT_LE(*r.eer, 100.0);
  EXPECT_GE(r.recognition_rate, 0.0);
  EXPECT_LE(r.recognition_rate, 100.0);
}

TEST(Evaluate, SingleClassHasNoEer) {
  const GroupedData d = test::gaussian_groups(9, 3, 8, 20, 2.0, 1.0);
  const DiscriminantModel m = reg_lda(d);
  const EvalReport r = evaluate(m, {d[1]}, Rule::Cosine);
  EXPECT_FALSE(r.eer.has_value());
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_GT(r.recognition_rate, 0.0);
  EXPECT_THROW(evaluate(m, {{"zz", d[0].samples}}, Rule::Cosine), ValidationError);
}

TEST(Evaluate, PermutationInvariant) {
  const GroupedData d = test::gaussian_groups(10, 4, 8, 20, 1.5, 1.0);
  const DiscriminantModel m = reg_lda(split(d, 0, 10));
  const GroupedData test = split(d, 10, 10);
  GroupedData shuffled(test.rbegin(), test.rend());
  for (auto& c : shuffled) c.samples = c.samples.rowwise().reverse().eval();
  const EvalReport a = evaluate(m, test, Rule::NearestMean), b = evaluate(m, shuffled, Rule::NearestMean);
  EXPECT_EQ(a.recognition_rate, b.recognition_rate);
  EXPECT_EQ(*a.eer, *b.eer);
  EXPECT_EQ(a.confusion, b.confusion);
}

}  // namespace
}  // namespace gfda
