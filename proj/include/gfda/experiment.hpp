#pragma once

// Experiment plumbing behind the command-line tool: configuration, model
// fitting by method name, the repeated train/test protocol and the
// eigenvalue curves of G and Ĝ.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gfda/classify.hpp"
#include "gfda/gds.hpp"
#include "gfda/io.hpp"
#include "gfda/synth.hpp"

namespace gfda::experiment {

enum class MethodKind { Fda, PcaLda, RegLda, NullLda, Gfda, GfdaLinear, Gds };

inline MethodKind parse_method_kind(std::string_view s) {
  if (s == "fda") return MethodKind::Fda;
  if (s == "pcaLDA") return MethodKind::PcaLda;
  if (s == "regLDA") return MethodKind::RegLda;
  if (s == "nullLDA") return MethodKind::NullLda;
  if (s == "gfda") return MethodKind::Gfda;
  if (s == "gfda-linear") return MethodKind::GfdaLinear;
  if (s == "gds") return MethodKind::Gds;
  throw ValidationError("unknown method '" + std::string(s) + "' (fda, pcaLDA, regLDA, nullLDA, gfda, gfda-linear, gds)");
}

inline bool is_subspace_method(MethodKind k) {
  return k == MethodKind::Gfda || k == MethodKind::GfdaLinear || k == MethodKind::Gds;
}

struct ExperimentConfig {
  // model
  std::string method = "gfda-linear";
  bool normalize = false;
  bool normalize_refs = true;
  std::optional<double> delta;               // regLDA, default 1e-4
  std::optional<double> residual_threshold;  // pcaLDA, default 1e-2 for 2 classes, 1e-9 otherwise
  std::optional<double> gamma;               // gds, default 0.90
  std::optional<Index> gds_dim;              // gds, fixed N_d instead of gamma
  std::optional<Index> class_dim;            // N_c; default: every training sample
  std::optional<double> class_energy;        // N_c by energy fraction instead

  // data and protocol
  std::string train;
  std::string test;
  std::string model;
  std::string out;
  Rule rule = Rule::NearestMean;
  Index n = 2;             // training samples per class
  Index repetitions = 1;
  std::uint64_t seed = 0;
  Index n_min = 2;
  Index n_max = 9;

  // generators and curves
  std::string kind = "mixture";   // synth: gaussian | mixture
  std::string mode = "Set1";      // mixture: Set1 | Set2
  Index classes = 3;
  Index subspace_dim = 3;
  Index dim = 30;
  double separation = 1.0;
  Index per_class = 20;
  double mean_norm = 2.0;
  double sigma_max = 1.0;
  Index lights = 9;
  double common = 1.0;
  double spread = 1.0;
  double individual = 0.5;

  // invariants
  std::string scope = "all";
  std::vector<Index> sweep_classes;   // empty: the full default sweep

  void validate() const {
    const MethodKind k = parse_method_kind(method);
    auto only = [&](bool set, bool allowed, const char* key) {
      if (set && !allowed) throw ValidationError(std::string(key) + " does not apply to method " + method);
    };
    only(delta.has_value(), k == MethodKind::RegLda, "delta");
    only(residual_threshold.has_value(), k == MethodKind::PcaLda, "residual_threshold");
    only(gamma.has_value(), k == MethodKind::Gds, "gamma");
    only(gds_dim.has_value(), k == MethodKind::Gds, "gds_dim");
    only(class_dim.has_value() || class_energy.has_value(), is_subspace_method(k), "class_dim/class_energy");
    if (gamma && gds_dim) throw ValidationError("gamma and gds_dim are mutually exclusive");
    if (class_dim && class_energy) throw ValidationError("class_dim and class_energy are mutually exclusive");
    if (delta && !(*delta > 0.0)) throw ValidationError("delta must be positive");
    if (residual_threshold && !(*residual_threshold >= 0.0 && *residual_threshold < 1.0)) {
      throw ValidationError("residual_threshold must lie in [0, 1)");
    }
    if (gamma && !(*gamma > 0.0 && *gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
    if (gds_dim && *gds_dim < 1) throw ValidationError("gds_dim must be at least 1");
    if (class_dim && *class_dim < 1) throw ValidationError("class_dim must be at least 1");
    if (class_energy && !(*class_energy > 0.0 && *class_energy <= 1.0)) {
      throw ValidationError("class_energy must lie in (0, 1]");
    }
    if (n < 1) throw ValidationError("n must be at least 1");
    if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
    if (n_min < 1 || n_min > n_max) throw ValidationError("need 1 <= n_min <= n_max");
    if (kind != "gaussian" && kind != "mixture") throw ValidationError("kind must be gaussian or mixture");
    if (mode != "Set1" && mode != "Set2") throw ValidationError("mode must be Set1 or Set2");
  }
};

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  if constexpr (std::is_floating_point_v<T>) {
    const auto v = io::parse_double(value);
    if (!v) throw ValidationError(key + ": '" + value + "' is not a number");
    return static_cast<T>(*v);
  } else {
    T v{};
    const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
      throw ValidationError(key + ": '" + value + "' is not an integer");
    }
    return v;
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ValidationError(key + ": '" + value + "' is not a boolean");
}

}  // namespace detail

/// Applies key=value settings on top of `cfg`. Unknown keys are errors.
inline void apply(ExperimentConfig& cfg, const io::KeyValues& kv) {
  using detail::parse_bool;
  using detail::parse_number;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters{
      {"method", [&](auto&, auto& v) { cfg.method = v; }},
      {"normalize", [&](auto& k, auto& v) { cfg.normalize = parse_bool(k, v); }},
      {"normalize_refs", [&](auto& k, auto& v) { cfg.normalize_refs = parse_bool(k, v); }},
      {"delta", [&](auto& k, auto& v) { cfg.delta = parse_number<double>(k, v); }},
      {"residual_threshold", [&](auto& k, auto& v) { cfg.residual_threshold = parse_number<double>(k, v); }},
      {"gamma", [&](auto& k, auto& v) { cfg.gamma = parse_number<double>(k, v); }},
      {"gds_dim", [&](auto& k, auto& v) { cfg.gds_dim = parse_number<Index>(k, v); }},
      {"class_dim", [&](auto& k, auto& v) { cfg.class_dim = parse_number<Index>(k, v); }},
      {"class_energy", [&](auto& k, auto& v) { cfg.class_energy = parse_number<double>(k, v); }},
      {"train", [&](auto&, auto& v) { cfg.train = v; }},
      {"test", [&](auto&, auto& v) { cfg.test = v; }},
      {"model", [&](auto&, auto& v) { cfg.model = v; }},
      {"out", [&](auto&, auto& v) { cfg.out = v; }},
      {"rule", [&](auto&, auto& v) { cfg.rule = parse_rule(v); }},
      {"n", [&](auto& k, auto& v) { cfg.n = parse_number<Index>(k, v); }},
      {"repetitions", [&](auto& k, auto& v) { cfg.repetitions = parse_number<Index>(k, v); }},
      {"seed", [&](auto& k, auto& v) { cfg.seed = parse_number<std::uint64_t>(k, v); }},
      {"n_min", [&](auto& k, auto& v) { cfg.n_min = parse_number<Index>(k, v); }},
      {"n_max", [&](auto& k, auto& v) { cfg.n_max = parse_number<Index>(k, v); }},
      {"kind", [&](auto&, auto& v) { cfg.kind = v; }},
      {"mode", [&](auto&, auto& v) { cfg.mode = v; }},
      {"classes", [&](auto& k, auto& v) { cfg.classes = parse_number<Index>(k, v); }},
      {"subspace_dim", [&](auto& k, auto& v) { cfg.subspace_dim = parse_number<Index>(k, v); }},
      {"dim", [&](auto& k, auto& v) { cfg.dim = parse_number<Index>(k, v); }},
      {"separation", [&](auto& k, auto& v) { cfg.separation = parse_number<double>(k, v); }},
      {"per_class", [&](auto& k, auto& v) { cfg.per_class = parse_number<Index>(k, v); }},
      {"mean_norm", [&](auto& k, auto& v) { cfg.mean_norm = parse_number<double>(k, v); }},
      {"sigma_max", [&](auto& k, auto& v) { cfg.sigma_max = parse_number<double>(k, v); }},
      {"lights", [&](auto& k, auto& v) { cfg.lights = parse_number<Index>(k, v); }},
      {"common", [&](auto& k, auto& v) { cfg.common = parse_number<double>(k, v); }},
      {"spread", [&](auto& k, auto& v) { cfg.spread = parse_number<double>(k, v); }},
      {"individual", [&](auto& k, auto& v) { cfg.individual = parse_number<double>(k, v); }},
      {"scope", [&](auto&, auto& v) { cfg.scope = v; }},
      {"sweep_classes",
       [&](auto& k, auto& v) {
         cfg.sweep_classes.clear();
         if (v.empty()) return;
         for (auto field : io::detail::split_fields(v)) cfg.sweep_classes.push_back(parse_number<Index>(k, io::detail::trim(field)));
       }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ValidationError("unknown config key '" + key + "'");
    it->second(key, value);
  }
}

/// Every setting as text, for run metadata. Unset optionals are omitted.
inline io::KeyValues to_key_values(const ExperimentConfig& cfg) {
  io::KeyValues kv;
  auto num = [](double v) { return io::format_double(v); };
  kv["method"] = cfg.method;
  kv["normalize"] = cfg.normalize ? "true" : "false";
  kv["normalize_refs"] = cfg.normalize_refs ? "true" : "false";
  if (cfg.delta) kv["delta"] = num(*cfg.delta);
  if (cfg.residual_threshold) kv["residual_threshold"] = num(*cfg.residual_threshold);
  if (cfg.gamma) kv["gamma"] = num(*cfg.gamma);
  if (cfg.gds_dim) kv["gds_dim"] = std::to_string(*cfg.gds_dim);
  if (cfg.class_dim) kv["class_dim"] = std::to_string(*cfg.class_dim);
  if (cfg.class_energy) kv["class_energy"] = num(*cfg.class_energy);
  kv["train"] = cfg.train;
  kv["test"] = cfg.test;
  kv["model"] = cfg.model;
  kv["out"] = cfg.out;
  kv["rule"] = std::string(rule_name(cfg.rule));
  kv["n"] = std::to_string(cfg.n);
  kv["repetitions"] = std::to_string(cfg.repetitions);
  kv["seed"] = std::to_string(cfg.seed);
  kv["n_min"] = std::to_string(cfg.n_min);
  kv["n_max"] = std::to_string(cfg.n_max);
  kv["kind"] = cfg.kind;
  kv["mode"] = cfg.mode;
  kv["classes"] = std::to_string(cfg.classes);
  kv["subspace_dim"] = std::to_string(cfg.subspace_dim);
  kv["dim"] = std::to_string(cfg.dim);
  kv["separation"] = num(cfg.separation);
  kv["per_class"] = std::to_string(cfg.per_class);
  kv["mean_norm"] = num(cfg.mean_norm);
  kv["sigma_max"] = num(cfg.sigma_max);
  kv["lights"] = std::to_string(cfg.lights);
  kv["common"] = num(cfg.common);
  kv["spread"] = num(cfg.spread);
  kv["individual"] = num(cfg.individual);
  kv["scope"] = cfg.scope;
  std::string classes;
  for (Index c : cfg.sweep_classes) classes += (classes.empty() ? "" : ",") + std::to_string(c);
  kv["sweep_classes"] = classes;
  return kv;
}

/// Uncentered-PCA class models of every class.
inline SubspaceEnsemble fit_ensemble(const GroupedData& data, const ExperimentConfig& cfg, Diagnostics& warnings) {
  std::vector<ClassModel> models;
  for (const auto& c : data) {
    DimRule rule = FixedDim{std::min(c.samples.cols(), c.samples.rows())};
    if (cfg.class_energy) {
      rule = EnergyThreshold{*cfg.class_energy};
    } else if (cfg.class_dim) {
      const Index cap = std::min(c.samples.cols(), c.samples.rows());
      if (*cfg.class_dim > cap) {
        warnings.push_back("class " + c.label + ": class_dim " + std::to_string(*cfg.class_dim) + " capped at " +
                           std::to_string(cap));
      }
      rule = FixedDim{std::min(*cfg.class_dim, cap)};
    }
    ClassModel m = fit_class(c.label, c.samples, rule);
    warnings.insert(warnings.end(), m.warnings.begin(), m.warnings.end());
    models.push_back(std::move(m));
  }
  return SubspaceEnsemble(std::move(models));
}

inline DiscriminantModel fit_model(const ExperimentConfig& cfg, const GroupedData& train) {
  cfg.validate();
  const MethodKind kind = parse_method_kind(cfg.method);
  Diagnostics warnings;
  DiscriminantModel model;
  switch (kind) {
    case MethodKind::Fda: model = fda(train); break;
    case MethodKind::RegLda: model = reg_lda(train, cfg.delta.value_or(kDefaultRegularization)); break;
    case MethodKind::PcaLda:
      model = pca_lda(train, cfg.residual_threshold.value_or(train.size() == 2 ? 1e-2 : 1e-9));
      break;
    case MethodKind::NullLda: model = null_lda(train); break;
    case MethodKind::Gfda: model = gfda_product_form(fit_ensemble(train, cfg, warnings)); break;
    case MethodKind::GfdaLinear: model = gfda_linear_form(fit_ensemble(train, cfg, warnings)); break;
    case MethodKind::Gds: {
      const GdsRule rule = cfg.gds_dim ? GdsRule(FixedCount{*cfg.gds_dim}) : GdsRule(PowerThreshold{cfg.gamma.value_or(0.90)});
      model = gds_model(fit_ensemble(train, cfg, warnings), rule);
      break;
    }
  }
  model.normalized = cfg.normalize;
  model.normalize_refs = cfg.normalize_refs;
  model.warnings.insert(model.warnings.begin(), warnings.begin(), warnings.end());
  return model;
}

struct Split {
  GroupedData train;
  GroupedData test;
  Diagnostics warnings;
};

/// n random training samples per class, the rest for testing. Classes with
/// fewer than n samples are skipped.
inline Split split_dataset(const GroupedData& data, Index n, std::uint64_t seed) {
  Split s;
  for (std::size_t c = 0; c < data.size(); ++c) {
    const auto& group = data[c];
    const Index count = group.samples.cols();
    if (count < n) {
      s.warnings.push_back("class " + group.label + " has " + std::to_string(count) + " samples < n=" +
                           std::to_string(n) + "; skipped");
      continue;
    }
    std::vector<Index> idx(static_cast<std::size_t>(count));
    std::iota(idx.begin(), idx.end(), Index{0});
    synth::Rng rng(synth::derive_seed(seed, c));
    for (Index i = 0; i < n; ++i) {
      const Index j = i + static_cast<Index>(rng.index(static_cast<std::uint64_t>(count - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    std::sort(idx.begin() + n, idx.end());
    Matrix tr(group.samples.rows(), n), te(group.samples.rows(), count - n);
    for (Index i = 0; i < count; ++i) {
      const auto col = group.samples.col(idx[static_cast<std::size_t>(i)]);
      if (i < n) tr.col(i) = col;
      else te.col(i - n) = col;
    }
    s.train.push_back({group.label, std::move(tr)});
    if (te.cols() > 0) s.test.push_back({group.label, std::move(te)});
  }
  if (s.train.size() < 2) throw ValidationError("fewer than 2 classes have at least n=" + std::to_string(n) + " samples");
  return s;
}

struct EvalRow {
  Index rep = 0;
  std::uint64_t seed = 0;
  Index n = 0;
  double recognition_rate = 0.0;
  std::optional<double> eer;
};

struct EvalSummary {
  std::string method;
  Rule rule = Rule::NearestMean;
  Index n = 0;
  std::vector<EvalRow> rows;
  double mean_rate = 0.0, std_rate = 0.0;
  std::optional<double> mean_eer, std_eer;
  std::string protocol;
  Diagnostics warnings;
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

inline void add_unique(Diagnostics& into, const Diagnostics& from) {
  for (const auto& w : from) {
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
  }
}

}  // namespace detail

/// R repetitions with seeds seed+i. Without a separate test set each
/// repetition splits `data`; with one, training samples are drawn from
/// `data` and the whole test set is used.
inline EvalSummary run_eval(const ExperimentConfig& cfg, const GroupedData& data, const GroupedData* test_set,
                            Index n) {
  cfg.validate();
  EvalSummary summary;
  summary.rule = cfg.rule;
  summary.n = n;
  std::vector<double> rates, eers;
  for (Index rep = 0; rep < cfg.repetitions; ++rep) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
    Split split = split_dataset(data, n, seed);
    if (test_set) split.test = *test_set;
    if (split.test.empty()) throw ValidationError("no test samples left after taking n=" + std::to_string(n));
    const DiscriminantModel model = fit_model(cfg, split.train);
    const EvalReport report = evaluate(model, split.test, cfg.rule);
    summary.method = report.method;
    summary.protocol = report.protocol;
    detail::add_unique(summary.warnings, split.warnings);
    detail::add_unique(summary.warnings, model.warnings);
    detail::add_unique(summary.warnings, report.warnings);
    summary.rows.push_back({rep, seed, n, report.recognition_rate, report.eer});
    rates.push_back(report.recognition_rate);
    if (report.eer) eers.push_back(*report.eer);
  }
  std::tie(summary.mean_rate, summary.std_rate) = detail::mean_std(rates);
  if (eers.size() == rates.size()) {
    const auto [m, s] = detail::mean_std(eers);
    summary.mean_eer = m;
    summary.std_eer = s;
  }
  return summary;
}

inline std::vector<EvalSummary> run_sweep(const ExperimentConfig& cfg, const GroupedData& data,
                                          const GroupedData* test_set) {
  std::vector<EvalSummary> out;
  for (Index n = cfg.n_min; n <= cfg.n_max; ++n) out.push_back(run_eval(cfg, data, test_set, n));
  return out;
}

namespace detail {
inline std::string opt(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }
}  // namespace detail

inline void write_eval_csv(std::ostream& out, const EvalSummary& s) {
  out << "rep,seed,n,recognition_rate,eer\n";
  for (const auto& r : s.rows) {
    out << r.rep << ',' << r.seed << ',' << r.n << ',' << io::format_double(r.recognition_rate) << ','
        << detail::opt(r.eer) << '\n';
  }
  out << "mean,," << s.n << ',' << io::format_double(s.mean_rate) << ',' << detail::opt(s.mean_eer) << '\n';
  out << "std,," << s.n << ',' << io::format_double(s.std_rate) << ',' << detail::opt(s.std_eer) << '\n';
}

inline void write_sweep_csv(std::ostream& out, const std::vector<EvalSummary>& rows) {
  out << "n,repetitions,mean_recognition_rate,std_recognition_rate,mean_eer,std_eer\n";
  for (const auto& s : rows) {
    out << s.n << ',' << s.rows.size() << ',' << io::format_double(s.mean_rate) << ','
        << io::format_double(s.std_rate) << ',' << detail::opt(s.mean_eer) << ',' << detail::opt(s.std_eer) << '\n';
  }
}

/// Ascending eigenvalues of G and Ĝ on the sum subspace, and f_g of the
/// corresponding eigenvectors under (Σ_B3, Σ_W4).
struct EigenCurves {
  Index classes = 0;
  Vector eig_g, eig_ghat, power_g, power_ghat;
  double gap = 0.0;

  /// L2 distance between the two eigenvalue curves.
  double divergence() const { return (eig_g - eig_ghat).norm(); }
};

inline EigenCurves eigencurves(const SubspaceEnsemble& e) {
  const Index classes = e.class_count();
  const OrthoBasis q = column_span(e.pooled_basis());
  const Matrix coords = q.matrix().transpose() * e.pooled_basis();
  const Matrix diffs = q.matrix().transpose() * pairwise_differences(e.first_basis_matrix());
  const Matrix g = SymMatrix::outer(coords).matrix();
  const Matrix b = SymMatrix::outer(diffs).matrix();
  const EigResult eg = sym_eig(SymMatrix(g));
  const EigResult eh = sym_eig(SymMatrix((g - b / static_cast<double>(classes)).eval()));
  const SymMatrix bs(b), gs(g);
  EigenCurves out;
  out.classes = classes;
  out.eig_g = eg.values;
  out.eig_ghat = eh.values;
  out.power_g.resize(eg.values.size());
  out.power_ghat.resize(eh.values.size());
  for (Index i = 0; i < eg.values.size(); ++i) {
    out.power_g(i) = fisher_criterion(eg.vectors.column(i), bs, gs);
    out.power_ghat(i) = fisher_criterion(eh.vectors.column(i), bs, gs);
  }
  out.gap = gap_index(classes);
  return out;
}

inline void write_eigencurves_csv(std::ostream& out, const EigenCurves& c) {
  out << "index,eigenvalue_G,eigenvalue_Ghat,power_G,power_Ghat\n";
  for (Index i = 0; i < c.eig_g.size(); ++i) {
    out << i + 1 << ',' << io::format_double(c.eig_g(i)) << ',' << io::format_double(c.eig_ghat(i)) << ','
        << io::format_double(c.power_g(i)) << ',' << io::format_double(c.power_ghat(i)) << '\n';
  }
}

/// Synthetic dataset described by the generator keys of `cfg`.
inline GroupedData synth_dataset(const ExperimentConfig& cfg) {
  if (cfg.classes < 2 || cfg.dim < 1 || cfg.per_class < 1) {
    throw ValidationError("synth: need classes >= 2, dim >= 1, per_class >= 1");
  }
  if (cfg.kind == "gaussian") {
    GroupedData out;
    synth::Rng rng(synth::derive_seed(cfg.seed, 0));
    for (Index c = 0; c < cfg.classes; ++c) {
      const Vector dir = rng.unit_vector(cfg.dim);
      out.push_back({"g" + std::to_string(c),
                     synth::gaussian_class(cfg.dim, dir, cfg.mean_norm, cfg.sigma_max, cfg.per_class,
                                           synth::derive_seed(cfg.seed, static_cast<std::uint64_t>(c) + 1))});
    }
    return out;
  }
  const auto bases = synth::lighting_bases({cfg.classes, cfg.dim, cfg.lights, cfg.common, cfg.spread, cfg.individual},
                                           synth::derive_seed(cfg.seed, 0));
  return synth::mixture_dataset(bases, cfg.mode == "Set1" ? synth::MixtureMode::Set1 : synth::MixtureMode::Set2,
                                cfg.per_class, synth::derive_seed(cfg.seed, 1));
}

}  // namespace gfda::experiment
