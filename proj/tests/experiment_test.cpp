#include "support.hpp"

#include <sstream>

#include "gfda/invariants.hpp"

namespace gfda {
namespace {

using experiment::ExperimentConfig;

ExperimentConfig config(const io::KeyValues& kv) {
  ExperimentConfig cfg;
  experiment::apply(cfg, kv);
  return cfg;
}

GroupedData mixture(std::uint64_t seed, Index classes, Index per_class) {
  ExperimentConfig cfg = config({{"classes", std::to_string(classes)}, {"dim", "40"},
                                 {"per_class", std::to_string(per_class)}});
  cfg.seed = seed;
  return experiment::synth_dataset(cfg);
}

TEST(Config, ParsesAndValidates) {
  const ExperimentConfig cfg = config({{"method", "gds"}, {"gamma", "0.8"}, {"normalize", "true"}, {"n", "3"}});
  EXPECT_EQ(*cfg.gamma, 0.8);
  EXPECT_TRUE(cfg.normalize);
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW(config({{"bogus", "1"}}), ValidationError);
  EXPECT_THROW(config({{"n", "two"}}), ValidationError);
  EXPECT_THROW(config({{"method", "lda"}}).validate(), ValidationError);
  EXPECT_THROW(config({{"method", "gfda"}, {"gamma", "0.9"}}).validate(), ValidationError);
  EXPECT_THROW(config({{"method", "gds"}, {"delta", "1e-4"}}).validate(), ValidationError);
  EXPECT_THROW(config({{"method", "regLDA"}, {"residual_threshold", "0.1"}}).validate(), ValidationError);
  EXPECT_THROW(config({{"method", "fda"}, {"class_dim", "2"}}).validate(), ValidationError);
  EXPECT_THROW(config({{"method", "gds"}, {"gamma", "1.5"}}).validate(), ValidationError);
  EXPECT_THROW(config({{"n_min", "5"}, {"n_max", "4"}}).validate(), ValidationError);
}

TEST(Config, KeyValuesRoundTrip) {
  const ExperimentConfig cfg =
      config({{"method", "regLDA"}, {"delta", "0.01"}, {"rule", "cosine"}, {"sweep_classes", "3,7"}, {"seed", "9"}});
  const ExperimentConfig back = config(experiment::to_key_values(cfg));
  EXPECT_EQ(experiment::to_key_values(back), experiment::to_key_values(cfg));
  EXPECT_EQ(back.sweep_classes, (std::vector<Index>{3, 7}));
  EXPECT_EQ(back.rule, Rule::Cosine);
}

TEST(FitModel, MethodsAndDefaults) {
  const GroupedData d = mixture(1, 4, 6);
  for (const char* m : {"fda", "pcaLDA", "regLDA", "nullLDA", "gfda", "gfda-linear", "gds"}) {
    const ExperimentConfig cfg = config({{"method", m}});
    if (std::string(m) == "fda") {
      EXPECT_THROW(experiment::fit_model(cfg, d), NotApplicableError);
      continue;
    }
    const DiscriminantModel model = experiment::fit_model(cfg, d);
    EXPECT_EQ(model.labels.size(), 4u) << m;
  }
  const DiscriminantModel g = experiment::fit_model(config({{"method", "gds"}, {"gds_dim", "5"}}), d);
  EXPECT_EQ(g.dim(), 5);
  const DiscriminantModel capped = experiment::fit_model(config({{"method", "gfda-linear"}, {"class_dim", "50"}}), d);
  EXPECT_FALSE(capped.warnings.empty());
  const DiscriminantModel norm = experiment::fit_model(config({{"method", "gfda"}, {"normalize", "true"}}), d);
  EXPECT_EQ(norm.name(), "gFDA-product+N");
}

TEST(Split, DeterministicDisjointAndSkipsSmallClasses) {
  GroupedData d = mixture(2, 3, 8);
  d[1].samples = d[1].samples.leftCols(2).eval();
  const experiment::Split a = experiment::split_dataset(d, 3, 11), b = experiment::split_dataset(d, 3, 11);
  ASSERT_EQ(a.train.size(), 2u);
  EXPECT_EQ(a.warnings.size(), 1u);
  for (std::size_t c = 0; c < a.train.size(); ++c) {
    EXPECT_EQ(a.train[c].samples, b.train[c].samples);
    EXPECT_EQ(a.train[c].samples.cols() + a.test[c].samples.cols(), 8);
    for (Index i = 0; i < a.train[c].samples.cols(); ++i) {
      for (Index j = 0; j < a.test[c].samples.cols(); ++j) {
        EXPECT_NE(a.train[c].samples.col(i), a.test[c].samples.col(j));
      }
    }
  }
  const experiment::Split other = experiment::split_dataset(d, 3, 12);
  EXPECT_NE(other.train[0].samples, a.train[0].samples);
  EXPECT_THROW(experiment::split_dataset(d, 9, 1), ValidationError);
}

TEST(RunEval, OneSamplePerClassBeatsChance) {
  const GroupedData d = mixture(3, 3, 20);
  ExperimentConfig cfg = config({{"method", "gfda-linear"}, {"repetitions", "5"}});
  const experiment::EvalSummary s = experiment::run_eval(cfg, d, nullptr, 1);
  ASSERT_EQ(s.rows.size(), 5u);
  EXPECT_GT(s.mean_rate, 100.0 / 3.0);
  EXPECT_EQ(s.rows[2].seed, 2u);
}

TEST(RunEval, RepeatableAndSweepShape) {
  const GroupedData d = mixture(4, 4, 12);
  ExperimentConfig cfg = config({{"method", "gfda"}, {"repetitions", "3"}, {"seed", "5"}});
  std::ostringstream a, b;
  experiment::write_eval_csv(a, experiment::run_eval(cfg, d, nullptr, 3));
  experiment::write_eval_csv(b, experiment::run_eval(cfg, d, nullptr, 3));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "rep,seed,n,recognition_rate,eer");

  const auto rows = experiment::run_sweep(cfg, d, nullptr);
  EXPECT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows.front().n, 2);
  EXPECT_EQ(rows.back().n, 9);
  std::ostringstream s;
  experiment::write_sweep_csv(s, rows);
  const std::string table = s.str();
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 9);
}

TEST(RunEval, StoredModelMatchesInProcess) {
  const GroupedData d = mixture(5, 4, 10);
  const experiment::Split split = experiment::split_dataset(d, 4, 0);
  const ExperimentConfig cfg = config({{"method", "gds"}, {"normalize", "true"}});
  const DiscriminantModel model = experiment::fit_model(cfg, split.train);
  const DiscriminantModel loaded = io::model_from_json(io::Json::parse(io::model_to_json(model).dump(1)));
  const EvalReport a = evaluate(model, split.test, Rule::NearestMean), b = evaluate(loaded, split.test, Rule::NearestMean);
  EXPECT_EQ(a.recognition_rate, b.recognition_rate);
  EXPECT_EQ(*a.eer, *b.eer);
  EXPECT_EQ(a.genuine, b.genuine);
}

TEST(Eigencurves, NullDirectionsAndPower) {
  const experiment::EigenCurves c3 = experiment::eigencurves(synth::subspace_config(3, 3, 30, 1.0, 1));
  EXPECT_LE(std::abs(c3.eig_ghat(0)), 1e-8);
  EXPECT_LE(std::abs(c3.eig_ghat(1)), 1e-8);
  EXPECT_GT(c3.eig_ghat(2), 1e-3);
  EXPECT_NEAR(c3.power_ghat(0), 3.0, 1e-8);
  EXPECT_NEAR(c3.power_ghat(1), 3.0, 1e-8);
  for (Index i = 1; i < c3.eig_g.size(); ++i) EXPECT_LE(c3.eig_g(i - 1), c3.eig_g(i));

  const experiment::EigenCurves c5 = experiment::eigencurves(synth::subspace_config(5, 3, 60, 1.0, 2));
  EXPECT_NEAR(c5.power_ghat.head(4).sum(), 20.0, 1e-8);
  std::ostringstream csv;
  experiment::write_eigencurves_csv(csv, c5);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "index,eigenvalue_G,eigenvalue_Ghat,power_G,power_Ghat");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 16);
}

TEST(Invariants, SmallSuitesPass) {
  EXPECT_TRUE(invariants::suite_c1(1, 27).passed);
  EXPECT_TRUE(invariants::suite_duality(2, 10, {7}).passed);
  EXPECT_TRUE(invariants::suite_ds(3, 20).passed);
  EXPECT_TRUE(invariants::suite_decomposition(4).passed);
  EXPECT_TRUE(invariants::suite_identities(5).passed);
  EXPECT_TRUE(invariants::suite_power(6, {2, 3, 5}).passed);
  EXPECT_THROW(invariants::run("nonsense", 0), ValidationError);
}

TEST(Invariants, GapTable) {
  const invariants::SuiteResult r = invariants::suite_gap(0, {3, 5, 20});
  EXPECT_TRUE(r.passed);
  const std::vector<std::string> expected{"C,sigma", "2,1", "3,1.3333333333333335", "5,1.6", "20,1.9", "100,1.98"};
  ASSERT_GE(r.lines.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(r.lines[i], expected[i]);
}

}  // namespace
}  // namespace gfda
