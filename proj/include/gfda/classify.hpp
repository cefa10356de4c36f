#pragma once

// Projection into a discriminant space, the two nearest-reference rules and
// recognition-rate / EER evaluation.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfda/fisher.hpp"

namespace gfda {

struct ProjectedPoint {
  Vector coords;
  bool normalized = false;
};

/// τ(x) = Dᵀ(A x), optionally scaled to unit length.
inline ProjectedPoint project(const DiscriminantModel& model, const Vector& x, bool normalize) {
  if (x.size() != model.input_dim()) {
    throw ValidationError("project: input has dimension " + std::to_string(x.size()) + ", model expects " +
                          std::to_string(model.input_dim()));
  }
  ProjectedPoint p{model.basis.matrix().transpose() * detail::apply_input_map(model, x), normalize};
  if (normalize) {
    const double norm = p.coords.norm();
    if (!(norm > 1e-12 * std::max(1.0, x.norm()))) {
      throw UndefinedDirectionError("project: projection vanishes, cannot normalize");
    }
    p.coords /= norm;
  }
  return p;
}

inline ProjectedPoint project(const DiscriminantModel& model, const Vector& x) {
  return project(model, x, model.normalized);
}

/// Reference of class c as used for classification.
inline Vector class_reference(const DiscriminantModel& model, Index c) {
  Vector ref = model.class_refs.col(c);
  if (model.normalized && model.normalize_refs) {
    const double norm = ref.norm();
    if (norm > 0.0) ref /= norm;
  }
  return ref;
}

enum class Rule { NearestMean, Cosine };

inline std::string_view rule_name(Rule r) { return r == Rule::NearestMean ? "nearest-mean" : "cosine"; }

inline Rule parse_rule(std::string_view name) {
  if (name == "nearest-mean") return Rule::NearestMean;
  if (name == "cosine") return Rule::Cosine;
  throw ValidationError("unknown rule '" + std::string(name) + "'");
}

/// Similarity of a projected point to a reference: −‖τ − r‖² or the signed cosine.
inline double similarity(Rule rule, const Vector& tau, const Vector& ref) {
  if (rule == Rule::NearestMean) return -(tau - ref).squaredNorm();
  const double denom = tau.norm() * ref.norm();
  if (!(denom > 0.0)) return -1.0;
  return tau.dot(ref) / denom;
}

/// Per-class similarities of x, in model label order.
inline Vector scores(const DiscriminantModel& model, const Vector& x, Rule rule) {
  const ProjectedPoint p = project(model, x);
  Vector out(model.class_count());
  for (Index c = 0; c < model.class_count(); ++c) out(c) = similarity(rule, p.coords, class_reference(model, c));
  return out;
}

namespace detail {

// Exact ties go to the lexicographically smallest label.
inline Index best_index(const Vector& s, const std::vector<std::string>& labels) {
  Index best = 0;
  for (Index c = 1; c < s.size(); ++c) {
    if (s(c) > s(best) || (s(c) == s(best) && labels[static_cast<std::size_t>(c)] < labels[static_cast<std::size_t>(best)])) {
      best = c;
    }
  }
  return best;
}

}  // namespace detail

inline std::string classify(const DiscriminantModel& model, const Vector& x, Rule rule) {
  return model.labels[static_cast<std::size_t>(detail::best_index(scores(model, x, rule), model.labels))];
}

inline std::string classify_nearest_mean(const DiscriminantModel& model, const Vector& x) {
  return classify(model, x, Rule::NearestMean);
}

inline std::string classify_cosine(const DiscriminantModel& model, const Vector& x) {
  return classify(model, x, Rule::Cosine);
}

/// Equal error rate in percent.
///
/// A score accepts when it is at least the threshold. The operating points of
/// all thresholds are joined by their lower convex hull in (false accept,
/// false reject) space, and the EER is where that hull crosses the diagonal.
/// Between two thresholds this is linear interpolation of the rates.
inline double eer(std::span<const double> genuine, std::span<const double> impostor) {
  if (genuine.empty() || impostor.empty()) throw ValidationError("eer: need genuine and impostor scores");
  std::vector<double> g(genuine.begin(), genuine.end()), im(impostor.begin(), impostor.end());
  std::sort(g.begin(), g.end());
  std::sort(im.begin(), im.end());
  std::vector<double> thresholds(g);
  thresholds.insert(thresholds.end(), im.begin(), im.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const auto ng = static_cast<double>(g.size()), ni = static_cast<double>(im.size());
  struct Point { double fa, fr; };
  std::vector<Point> points{{0.0, 1.0}};
  for (double t : thresholds) {
    const auto rejected = static_cast<double>(std::lower_bound(g.begin(), g.end(), t) - g.begin());
    const auto accepted = static_cast<double>(im.end() - std::lower_bound(im.begin(), im.end(), t));
    points.push_back({accepted / ni, rejected / ng});
  }

  // Points come ordered by nondecreasing fa and nonincreasing fr.
  std::vector<Point> hull;
  for (const Point& p : points) {
    while (hull.size() >= 2) {
      const Point& a = hull[hull.size() - 2];
      const Point& b = hull.back();
      const double cross = (b.fa - a.fa) * (p.fr - a.fr) - (b.fr - a.fr) * (p.fa - a.fa);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(p);
  }
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const double da = hull[i].fr - hull[i].fa;
    const double db = hull[i + 1].fr - hull[i + 1].fa;
    if (da >= 0.0 && db <= 0.0) {
      if (da == db) return 100.0 * hull[i].fa;
      const double t = da / (da - db);
      return 100.0 * (hull[i].fa + t * (hull[i + 1].fa - hull[i].fa));
    }
  }
  return 100.0 * hull.back().fa;
}

struct EvalReport {
  std::string method;
  Rule rule = Rule::NearestMean;
  double recognition_rate = 0.0;       // percent
  std::optional<double> eer;           // percent
  std::vector<std::string> labels;     // model label order
  std::vector<std::vector<Index>> confusion;  // [true][predicted]
  std::vector<double> genuine;
  std::vector<double> impostor;
  Index total = 0;
  std::string protocol = "one genuine score per test sample against its own class reference, "
                         "C-1 impostor scores against the other references, pooled; "
                         "EER on the lower convex hull of the ROC";
  Diagnostics warnings;
};

/// Classifies every test sample and collects verification scores.
inline EvalReport evaluate(const DiscriminantModel& model, const GroupedData& test, Rule rule) {
  detail::check_grouped(test, "evaluate");
  std::map<std::string, Index> index;
  for (std::size_t c = 0; c < model.labels.size(); ++c) index[model.labels[c]] = static_cast<Index>(c);

  EvalReport report;
  report.method = model.name();
  report.rule = rule;
  report.labels = model.labels;
  const auto classes = static_cast<std::size_t>(model.class_count());
  report.confusion.assign(classes, std::vector<Index>(classes, 0));
  Index correct = 0;
  for (const auto& group : test) {
    const auto it = index.find(group.label);
    if (it == index.end()) throw ValidationError("evaluate: test label '" + group.label + "' unknown to the model");
    const Index truth = it->second;
    for (Index j = 0; j < group.samples.cols(); ++j) {
      const Vector s = scores(model, group.samples.col(j), rule);
      const Index predicted = detail::best_index(s, model.labels);
      ++report.confusion[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
      if (predicted == truth) ++correct;
      ++report.total;
      for (Index c = 0; c < s.size(); ++c) (c == truth ? report.genuine : report.impostor).push_back(s(c));
    }
  }
  report.recognition_rate = 100.0 * static_cast<double>(correct) / static_cast<double>(report.total);
  if (test.size() < 2) {
    report.warnings.push_back("evaluate: single-class test set, EER undefined");
  } else {
    report.eer = eer(report.genuine, report.impostor);
  }
  return report;
}

}  // namespace gfda
