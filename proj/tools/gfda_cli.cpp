// gfda: fit, evaluate and inspect subspace discriminant models.
//
//   gfda fit         --config run.cfg --out model.json
//   gfda eval        --config run.cfg --out eval.csv
//   gfda sweep       --config run.cfg --out sweep.csv
//   gfda invariants  [--set scope=duality --set sweep_classes=7]
//   gfda eigencurves --set classes=5 --out curves.csv
//   gfda synth       --set kind=mixture --out data.csv
//
// Exit status: 0 success, 1 invalid input or a method that cannot run on the
// data, 2 an invariant suite failed.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gfda/invariants.hpp"

namespace {

using namespace gfda;
using experiment::ExperimentConfig;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
};

ExperimentConfig load_config(const Options& opt) {
  ExperimentConfig cfg;
  if (!opt.config.empty()) experiment::apply(cfg, io::read_key_values(opt.config));
  io::KeyValues overrides;
  for (const auto& s : opt.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ValidationError("--set expects key=value, got '" + s + "'");
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  experiment::apply(cfg, overrides);
  if (opt.seed) cfg.seed = *opt.seed;
  if (!opt.out.empty()) cfg.out = opt.out;
  return cfg;
}

// Writes `text` to cfg.out, or stdout when no path is set, plus a sidecar
// `<out>.meta.json` describing the run.
void emit(const ExperimentConfig& cfg, const std::string& command, const std::string& text,
          const io::Json& extra = io::Json::object(), const Diagnostics& warnings = {}) {
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + cfg.out + "'");
    out << text;
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  if (cfg.out.empty()) return;
  io::Json meta;
  meta["command"] = command;
  meta["generator_version"] = synth::kGeneratorVersion;
  meta["model_format_version"] = io::kModelFormatVersion;
  meta["config"] = experiment::to_key_values(cfg);
  meta["warnings"] = warnings;
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  std::ofstream m(cfg.out + ".meta.json", std::ios::binary);
  if (!m) throw ValidationError("cannot write '" + cfg.out + ".meta.json'");
  m << meta.dump(1) << '\n';
}

GroupedData require_dataset(const std::string& path, const char* key) {
  if (path.empty()) throw ValidationError(std::string("no dataset given; set ") + key + "=PATH");
  return io::read_dataset(path);
}

int cmd_fit(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.out.empty()) cfg.out = cfg.model;
  const GroupedData train = require_dataset(cfg.train, "train");
  const DiscriminantModel model = experiment::fit_model(cfg, train);
  emit(cfg, "fit", io::model_to_json(model).dump(1) + "\n", {{"method", model.name()}}, model.warnings);
  return 0;
}

int cmd_eval(const ExperimentConfig& cfg) {
  if (!cfg.model.empty()) {
    // Evaluate a stored model on the test set as a single repetition.
    const DiscriminantModel model = io::load_model(cfg.model);
    const GroupedData test = require_dataset(cfg.test, "test");
    const EvalReport report = evaluate(model, test, cfg.rule);
    experiment::EvalSummary s;
    s.method = report.method;
    s.rule = cfg.rule;
    s.n = 0;
    s.rows.push_back({0, cfg.seed, 0, report.recognition_rate, report.eer});
    s.mean_rate = report.recognition_rate;
    s.mean_eer = report.eer;
    if (report.eer) s.std_eer = 0.0;
    std::ostringstream text;
    experiment::write_eval_csv(text, s);
    Diagnostics warnings = model.warnings;
    warnings.insert(warnings.end(), report.warnings.begin(), report.warnings.end());
    emit(cfg, "eval", text.str(), {{"method", report.method}, {"protocol", report.protocol}}, warnings);
    return 0;
  }
  const GroupedData data = require_dataset(cfg.train, "train");
  std::optional<GroupedData> test;
  if (!cfg.test.empty()) test = io::read_dataset(cfg.test);
  const experiment::EvalSummary s = experiment::run_eval(cfg, data, test ? &*test : nullptr, cfg.n);
  std::ostringstream text;
  experiment::write_eval_csv(text, s);
  emit(cfg, "eval", text.str(), {{"method", s.method}, {"protocol", s.protocol}}, s.warnings);
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const GroupedData data = require_dataset(cfg.train, "train");
  std::optional<GroupedData> test;
  if (!cfg.test.empty()) test = io::read_dataset(cfg.test);
  const auto rows = experiment::run_sweep(cfg, data, test ? &*test : nullptr);
  std::ostringstream text;
  experiment::write_sweep_csv(text, rows);
  Diagnostics warnings;
  for (const auto& r : rows) experiment::detail::add_unique(warnings, r.warnings);
  emit(cfg, "sweep", text.str(), {{"method", rows.front().method}, {"protocol", rows.front().protocol}}, warnings);
  return 0;
}

int cmd_invariants(const ExperimentConfig& cfg) {
  const auto results = invariants::run(cfg.scope, cfg.seed, cfg.sweep_classes);
  std::ostringstream text;
  invariants::write_report(text, results);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  emit(cfg, "invariants", text.str(), {{"passed", ok}});
  return ok ? 0 : 2;
}

int cmd_eigencurves(const ExperimentConfig& cfg) {
  const SubspaceEnsemble e = synth::subspace_config(cfg.classes, cfg.subspace_dim, cfg.dim, cfg.separation, cfg.seed);
  const experiment::EigenCurves curves = experiment::eigencurves(e);
  std::ostringstream text;
  experiment::write_eigencurves_csv(text, curves);
  emit(cfg, "eigencurves", text.str(),
       {{"gap_index", curves.gap}, {"curve_distance", curves.divergence()},
        {"total_power_Ghat", curves.power_ghat.head(cfg.classes - 1).sum()}});
  return 0;
}

int cmd_synth(const ExperimentConfig& cfg) {
  std::ostringstream text;
  io::write_dataset(text, experiment::synth_dataset(cfg));
  io::Json extra;
  if (cfg.kind == "mixture") extra["simplex"] = "uniform (normalized exponentials)";
  emit(cfg, "synth", text.str(), extra.is_null() ? io::Json::object() : extra);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subspace discriminant analysis: fit, evaluate, sweep and check invariants"};
  app.require_subcommand(1, 1);
  Options opt;
  const std::vector<std::pair<const char*, const char*>> verbs{
      {"fit", "fit a model on the training set and write it as JSON"},
      {"eval", "repeated random train/test evaluation, or a stored model on a test set"},
      {"sweep", "evaluation over n = n_min..n_max training samples per class"},
      {"invariants", "run the seeded property suites"},
      {"eigencurves", "eigenvalues and Fisher power of G and G_hat on a synthetic ensemble"},
      {"synth", "write a synthetic dataset"},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "key=value configuration file");
    sub->add_option("--seed", opt.seed, "base seed");
    sub->add_option("--out", opt.out, "output path (stdout if omitted)");
    sub->add_option("--set", opt.sets, "override a configuration key, key=value")->take_all();
    subs[name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    const ExperimentConfig cfg = load_config(opt);
    if (subs["fit"]->parsed()) return cmd_fit(cfg);
    if (subs["eval"]->parsed()) return cmd_eval(cfg);
    if (subs["sweep"]->parsed()) return cmd_sweep(cfg);
    if (subs["invariants"]->parsed()) return cmd_invariants(cfg);
    if (subs["eigencurves"]->parsed()) return cmd_eigencurves(cfg);
    return cmd_synth(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
