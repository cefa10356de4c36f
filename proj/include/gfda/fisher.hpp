#pragma once

// Scatter matrices along the simplification ladder, the FDA family with its
// small-sample workarounds, and gFDA in its two dual forms.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gfda/linalg.hpp"
#include "gfda/subspace.hpp"

namespace gfda {

/// Samples of one class, one sample per column.
struct ClassSamples {
  std::string label;
  Matrix samples;
};

using GroupedData = std::vector<ClassSamples>;

namespace detail {

inline Index check_grouped(const GroupedData& data, std::string_view who) {
  if (data.empty()) throw ValidationError(std::string(who) + ": no classes");
  const Index dim = data.front().samples.rows();
  for (const auto& c : data) {
    if (c.samples.cols() == 0) throw ValidationError(std::string(who) + ": class " + c.label + " is empty");
    if (c.samples.rows() != dim) throw ValidationError(std::string(who) + ": class " + c.label + " has wrong dimension");
  }
  return dim;
}

inline Matrix class_means(const GroupedData& data) {
  Matrix means(data.front().samples.rows(), static_cast<Index>(data.size()));
  for (std::size_t c = 0; c < data.size(); ++c) means.col(static_cast<Index>(c)) = data[c].samples.rowwise().mean();
  return means;
}

inline std::vector<Index> class_counts(const GroupedData& data) {
  std::vector<Index> counts;
  for (const auto& c : data) counts.push_back(c.samples.cols());
  return counts;
}

inline Matrix columns(const Matrix& m, const std::vector<Index>& idx) {
  Matrix out(m.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Index>(j)) = m.col(idx[j]);
  return out;
}

}  // namespace detail

/// Σ_W = (1/n) Σ_c Σ_i (x − m_c)(x − m_c)ᵀ.
inline SymMatrix within_scatter(const GroupedData& data) {
  const Index dim = detail::check_grouped(data, "within_scatter");
  Matrix acc = Matrix::Zero(dim, dim);
  Index n = 0;
  for (const auto& c : data) {
    const Matrix centered = c.samples.colwise() - c.samples.rowwise().mean();
    acc.selfadjointView<Eigen::Lower>().rankUpdate(centered);
    n += c.samples.cols();
  }
  acc.triangularView<Eigen::StrictlyUpper>() = acc.transpose();
  return SymMatrix((acc / static_cast<double>(n)).eval());
}

/// Σ_B = (1/n) Σ_c n_c (m_c − m)(m_c − m)ᵀ, m the pooled mean.
inline SymMatrix between_scatter(const Matrix& means, std::span<const Index> counts) {
  if (means.cols() < 2 || static_cast<std::size_t>(means.cols()) != counts.size()) {
    throw ValidationError("between_scatter: need at least 2 classes with one count each");
  }
  double n = 0.0;
  Vector pooled = Vector::Zero(means.rows());
  for (Index c = 0; c < means.cols(); ++c) {
    n += static_cast<double>(counts[static_cast<std::size_t>(c)]);
    pooled += static_cast<double>(counts[static_cast<std::size_t>(c)]) * means.col(c);
  }
  pooled /= n;
  Matrix weighted(means.rows(), means.cols());
  for (Index c = 0; c < means.cols(); ++c) {
    weighted.col(c) = std::sqrt(static_cast<double>(counts[static_cast<std::size_t>(c)]) / n) *
                      (means.col(c) - pooled);
  }
  return SymMatrix::outer(weighted);
}

/// Σ_B = (1/n²) Σ_{i<j} n_i n_j (m_i − m_j)(m_i − m_j)ᵀ.
inline SymMatrix between_scatter_pairwise(const Matrix& means, std::span<const Index> counts) {
  if (means.cols() < 2 || static_cast<std::size_t>(means.cols()) != counts.size()) {
    throw ValidationError("between_scatter_pairwise: need at least 2 classes with one count each");
  }
  double n = 0.0;
  for (Index k : counts) n += static_cast<double>(k);
  const Index classes = means.cols();
  Matrix diffs(means.rows(), classes * (classes - 1) / 2);
  Index at = 0;
  for (Index i = 0; i < classes; ++i) {
    for (Index j = i + 1; j < classes; ++j) {
      const double w = std::sqrt(static_cast<double>(counts[static_cast<std::size_t>(i)]) *
                                 static_cast<double>(counts[static_cast<std::size_t>(j)])) / n;
      diffs.col(at++) = w * (means.col(i) - means.col(j));
    }
  }
  return SymMatrix::outer(diffs);
}

/// Pairwise differences of the columns of `vectors`, i < j order.
inline Matrix pairwise_differences(const Matrix& vectors) {
  const Index c = vectors.cols();
  Matrix out(vectors.rows(), c * (c - 1) / 2);
  Index at = 0;
  for (Index i = 0; i < c; ++i) {
    for (Index j = i + 1; j < c; ++j) out.col(at++) = vectors.col(i) - vectors.col(j);
  }
  return out;
}

/// Σ_B3 = Σ_{i<j} (φ₁ⁱ − φ₁ʲ)(φ₁ⁱ − φ₁ʲ)ᵀ.
inline SymMatrix first_basis_scatter(const SubspaceEnsemble& ensemble) {
  return SymMatrix::outer(pairwise_differences(ensemble.first_basis_matrix()));
}

/// G = Σ_W4 = Σ_c P_c.
inline SymMatrix sum_matrix(const SubspaceEnsemble& ensemble) {
  return SymMatrix::outer(ensemble.pooled_basis());
}

enum class Rung { FDA, aFDA, sFDA, gFDA };

inline std::string_view rung_name(Rung r) {
  switch (r) {
    case Rung::FDA: return "FDA";
    case Rung::aFDA: return "aFDA";
    case Rung::sFDA: return "sFDA";
    case Rung::gFDA: return "gFDA";
  }
  return "?";
}

struct ScatterPair {
  SymMatrix between;
  SymMatrix within;
  Rung rung = Rung::gFDA;
  Diagnostics warnings;
};

/// Scatter pair at one rung of the ladder, built from the class models.
///
/// FDA: exact (Σ_B, Σ_W) from means, counts and the full R_c spectrum.
/// aFDA: (Σ_B1, Σ_W1); sFDA: (Σ_B2, Σ_W2); gFDA: (Σ_B3, Σ_W4).
/// The aFDA/sFDA formulas assume equal counts and equal mean norms. With
/// unequal values each class's own n_c and ‖m_c‖ are used (Σ_B2 takes the
/// root mean square of the mean norms) and a warning is attached.
inline ScatterPair scatter_ladder(const SubspaceEnsemble& ensemble, Rung rung) {
  const Index dim = ensemble.ambient_dim();
  const Index classes = ensemble.class_count();
  if (rung == Rung::gFDA) return {first_basis_scatter(ensemble), sum_matrix(ensemble), rung, {}};

  for (const auto& c : ensemble.classes()) {
    if (!c.has_samples()) {
      throw ValidationError("scatter_ladder(" + std::string(rung_name(rung)) + "): class " + c.label +
                            " has no sample statistics");
    }
  }
  ScatterPair pair{SymMatrix::zeros(dim), SymMatrix::zeros(dim), rung, {}};
  double n = 0.0;
  for (const auto& c : ensemble.classes()) n += static_cast<double>(c.count);

  const auto& first = ensemble[0];
  bool equal_counts = true, equal_norms = true;
  for (const auto& c : ensemble.classes()) {
    equal_counts = equal_counts && c.count == first.count;
    equal_norms = equal_norms && std::abs(c.mean.norm() - first.mean.norm()) <= 1e-9 * first.mean.norm();
  }

  if (rung == Rung::FDA) {
    Matrix within = Matrix::Zero(dim, dim);
    Matrix means(dim, classes);
    std::vector<Index> counts;
    for (Index k = 0; k < classes; ++k) {
      const auto& c = ensemble[static_cast<std::size_t>(k)];
      const Matrix& phi = c.spectrum_basis.matrix();
      within += static_cast<double>(c.count) *
                (phi * c.spectrum.asDiagonal() * phi.transpose() - c.mean * c.mean.transpose());
      means.col(k) = c.mean;
      counts.push_back(c.count);
    }
    within /= n;
    pair.within = SymMatrix(0.5 * (within + within.transpose()));
    pair.between = between_scatter(means, counts);
    return pair;
  }

  if (!equal_counts) pair.warnings.push_back("scatter_ladder: class counts differ; per-class n_c used");

  // Within side: per-class variances along the principal directions, with
  // σ₁² = λ₁ − ‖m_c‖² for the first one.
  Matrix within = Matrix::Zero(dim, dim);
  for (const auto& c : ensemble.classes()) {
    const bool full = rung == Rung::aFDA;
    const Matrix& phi = full ? c.spectrum_basis.matrix() : c.basis.matrix();
    Vector var = full ? c.spectrum : c.eigenvalues;
    var(0) -= c.mean.squaredNorm();
    if (var(0) < 0.0) {
      pair.warnings.push_back("scatter_ladder: class " + c.label + " has lambda_1 < |m|^2; sigma_1^2 clamped to 0");
      var(0) = 0.0;
    }
    within += (static_cast<double>(c.count) / n) * (phi * var.asDiagonal() * phi.transpose());
  }
  pair.within = SymMatrix(0.5 * (within + within.transpose()));

  if (rung == Rung::aFDA) {
    Matrix diffs(dim, classes * (classes - 1) / 2);
    Index at = 0;
    for (Index i = 0; i < classes; ++i) {
      for (Index j = i + 1; j < classes; ++j) {
        const auto& a = ensemble[static_cast<std::size_t>(i)];
        const auto& b = ensemble[static_cast<std::size_t>(j)];
        const double w = std::sqrt(static_cast<double>(a.count) * static_cast<double>(b.count)) / n;
        diffs.col(at++) = w * (a.mean.norm() * a.first_basis() - b.mean.norm() * b.first_basis());
      }
    }
    pair.between = SymMatrix::outer(diffs);
    return pair;
  }

  if (!equal_norms) pair.warnings.push_back("scatter_ladder: mean norms differ; root mean square norm used");
  double norm_sq = 0.0;
  for (const auto& c : ensemble.classes()) norm_sq += c.mean.squaredNorm();
  norm_sq /= static_cast<double>(classes);
  pair.between = (norm_sq / static_cast<double>(classes * classes)) * first_basis_scatter(ensemble);
  return pair;
}

/// dᵀ B d / dᵀ W d.
inline double fisher_criterion(const Vector& d, const SymMatrix& between, const SymMatrix& within) {
  if (d.size() != within.order() || between.order() != within.order()) {
    throw ValidationError("fisher_criterion: dimension mismatch");
  }
  const double denom = d.dot(within.matrix() * d);
  const double scale = d.squaredNorm() * std::max(within.frobenius_norm(), 1e-300);
  if (!(denom > 1e-12 * scale)) {
    throw UndefinedDirectionError("fisher_criterion: within-class scatter vanishes along d");
  }
  return d.dot(between.matrix() * d) / denom;
}

inline double fisher_criterion(const Vector& d, const ScatterPair& pair) {
  return fisher_criterion(d, pair.between, pair.within);
}

/// f(dᵢ) for every basis vector.
inline std::vector<double> discriminant_power_curve(const OrthoBasis& basis, const ScatterPair& pair) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(basis.dim()));
  for (Index i = 0; i < basis.dim(); ++i) out.push_back(fisher_criterion(basis.column(i), pair));
  return out;
}

/// σ = 2(1 − 1/C).
inline double gap_index(Index classes) {
  if (classes < 2) throw ValidationError("gap_index: need at least 2 classes");
  return 2.0 * (1.0 - 1.0 / static_cast<double>(classes));
}

/// Span of the k leading solutions of B d = λ W d, orthonormalized.
/// Requires W positive definite.
inline OrthoBasis discriminant_span(const SymMatrix& between, const SymMatrix& within, Index k) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(between.matrix(), within.matrix());
  if (solver.info() != Eigen::Success) {
    throw NotApplicableError("discriminant_span: within-class scatter is not positive definite");
  }
  const Index n = between.order();
  k = std::min(k, n);
  Matrix top(n, k);
  for (Index i = 0; i < k; ++i) top.col(i) = solver.eigenvectors().col(n - 1 - i);
  return gram_schmidt(top);
}

inline OrthoBasis discriminant_span(const ScatterPair& pair, Index k) {
  return discriminant_span(pair.between, pair.within, k);
}

enum class Method { FDA, PcaLDA, RegLDA, NullLDA, GfdaProduct, GfdaLinear, GDS };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::FDA: return "FDA";
    case Method::PcaLDA: return "pcaLDA";
    case Method::RegLDA: return "regLDA";
    case Method::NullLDA: return "nullLDA";
    case Method::GfdaProduct: return "gFDA-product";
    case Method::GfdaLinear: return "gFDA-linear";
    case Method::GDS: return "GDS";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  for (Method m : {Method::FDA, Method::PcaLDA, Method::RegLDA, Method::NullLDA, Method::GfdaProduct,
                   Method::GfdaLinear, Method::GDS}) {
    if (method_name(m) == name) return m;
  }
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

/// A discriminant space together with what is needed to classify in it.
///
/// Inputs map to coordinates as τ(x) = basisᵀ (W x) where W is `whitening`
/// when present (the product form works in whitened coordinates) and the
/// identity otherwise.
struct DiscriminantModel {
  Method method = Method::GfdaLinear;
  OrthoBasis basis;
  std::optional<Matrix> whitening;   // r × L
  std::vector<std::string> labels;
  Matrix class_refs;                 // k × C, unnormalized
  Vector criterion_values;           // per-direction eigenvalue of the defining problem
  bool normalized = false;           // the "+N" variant
  bool normalize_refs = true;        // under normalization, also scale refs to unit length
  bool within_fallback = false;      // pcaLDA fell back to regularization
  Diagnostics warnings;

  Index input_dim() const { return whitening ? whitening->cols() : basis.ambient_dim(); }
  Index dim() const { return basis.dim(); }
  Index class_count() const { return class_refs.cols(); }

  std::string name() const {
    std::string s(method_name(method));
    if (normalized) s += "+N";
    return s;
  }

  /// Discriminant directions expressed in the input space, orthonormalized.
  OrthoBasis data_space_basis() const {
    if (!whitening) return basis;
    return gram_schmidt((whitening->transpose() * basis.matrix()).eval());
  }
};

namespace detail {

inline Vector apply_input_map(const DiscriminantModel& m, const Vector& x) {
  return m.whitening ? Vector(*m.whitening * x) : x;
}

inline Matrix refs_from(const DiscriminantModel& m, const Matrix& points) {
  Matrix refs(m.dim(), points.cols());
  for (Index c = 0; c < points.cols(); ++c) refs.col(c) = m.basis.matrix().transpose() * apply_input_map(m, points.col(c));
  return refs;
}

struct GfdaReduction {
  OrthoBasis span;     // L × r sum subspace
  Matrix within;       // r × r, Σ_W4 in span coordinates
  Matrix between;      // r × r, Σ_B3 in span coordinates
};

inline GfdaReduction reduce(const SubspaceEnsemble& ensemble) {
  const Matrix pooled = ensemble.pooled_basis();
  GfdaReduction red;
  red.span = column_span(pooled);
  const Matrix& q = red.span.matrix();
  const Matrix coords = q.transpose() * pooled;
  const Matrix diffs = q.transpose() * pairwise_differences(ensemble.first_basis_matrix());
  red.within = SymMatrix::outer(coords).matrix();
  red.between = SymMatrix::outer(diffs).matrix();
  return red;
}

}  // namespace detail

/// gFDA from the generalized problem Σ_B3 d = λ Σ_W4 d, solved as whitening
/// followed by PCA of the whitened first-basis differences.
///
/// Works on the span of the pooled class bases, where Σ_W4 is nonsingular as
/// long as the pooled basis vectors are linearly independent. The basis is
/// returned in whitened coordinates together with the whitening map.
inline DiscriminantModel gfda_product_form(const SubspaceEnsemble& ensemble) {
  const Index classes = ensemble.class_count();
  const detail::GfdaReduction red = detail::reduce(ensemble);
  const Index r = red.span.dim();
  if (r < ensemble.total_dim()) {
    throw DegenerateError("gfda_product_form: pooled class bases have rank " + std::to_string(r) + " < " +
                          std::to_string(ensemble.total_dim()) + "; class subspaces overlap");
  }
  const Whitening white = whitening(SymMatrix(red.within));
  if (white.rank() < r) {
    throw DegenerateError("gfda_product_form: Sigma_W4 singular on the reduced space; class subspaces overlap");
  }
  const Matrix& a = white.map;
  const EigResult eig = sym_eig(SymMatrix((a.transpose() * red.between * a).eval()));

  Matrix top(r, classes - 1);
  Vector values(classes - 1);
  for (Index i = 0; i < classes - 1; ++i) {
    top.col(i) = eig.vectors.column(r - 1 - i);
    values(i) = eig.values(r - 1 - i);
  }

  DiscriminantModel model;
  model.method = Method::GfdaProduct;
  model.basis = gram_schmidt(top);
  model.whitening = (a.transpose() * red.span.matrix().transpose()).eval();
  model.labels = ensemble.labels();
  model.criterion_values = values;
  model.class_refs = detail::refs_from(model, ensemble.first_basis_matrix());
  return model;
}

/// gFDA from the null space of Ĝ = Σ_W4 − Σ_B3 / C.
///
/// Ĝ is decomposed on the sum subspace of the classes: outside it both
/// matrices vanish and every direction would be a spurious zero eigenvector.
/// The C − 1 smallest eigenvalues are taken by index; a warning reports the
/// largest of them when it is not numerically zero.
inline DiscriminantModel gfda_linear_form(const SubspaceEnsemble& ensemble, double zero_tol = 1e-8) {
  const Index classes = ensemble.class_count();
  const detail::GfdaReduction red = detail::reduce(ensemble);
  const Index r = red.span.dim();
  if (r < classes - 1) {
    throw DegenerateError("gfda_linear_form: sum subspace has dimension " + std::to_string(r) + " < C-1");
  }
  const Matrix g_hat = red.within - red.between / static_cast<double>(classes);
  const EigResult eig = sym_eig(SymMatrix(g_hat));

  DiscriminantModel model;
  model.method = Method::GfdaLinear;
  model.criterion_values = eig.values.head(classes - 1);
  const double worst = model.criterion_values.cwiseAbs().maxCoeff();
  if (worst > zero_tol) {
    model.warnings.push_back("gfda_linear_form: largest selected eigenvalue of G_hat is " + std::to_string(worst) +
                             "; class subspaces may overlap");
  }
  model.basis = gram_schmidt((red.span.matrix() * eig.vectors.matrix().leftCols(classes - 1)).eval());
  model.labels = ensemble.labels();
  model.class_refs = detail::refs_from(model, ensemble.first_basis_matrix());
  return model;
}

namespace detail {

inline DiscriminantModel data_model(Method method, const GroupedData& data, OrthoBasis basis, Vector values) {
  DiscriminantModel model;
  model.method = method;
  model.basis = std::move(basis);
  model.criterion_values = std::move(values);
  for (const auto& c : data) model.labels.push_back(c.label);
  model.class_refs = refs_from(model, class_means(data));
  return model;
}

/// Leading k generalized eigenpairs of (B, W), W positive definite.
inline std::pair<Matrix, Vector> leading_generalized(const Matrix& b, const Matrix& w, Index k) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(b, w);
  if (solver.info() != Eigen::Success) throw NotApplicableError("within-class scatter is not positive definite");
  const Index n = b.rows();
  Matrix vecs(n, k);
  Vector vals(k);
  for (Index i = 0; i < k; ++i) {
    vecs.col(i) = solver.eigenvectors().col(n - 1 - i);
    vals(i) = solver.eigenvalues()(n - 1 - i);
  }
  return {vecs, vals};
}

inline bool is_positive_definite(const Matrix& m, double tol = kDefaultRankTol) {
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
  return ev(ev.size() - 1) > 0.0 && ev(0) > tol * ev(ev.size() - 1);
}

inline void check_classes(const GroupedData& data, std::string_view who) {
  check_grouped(data, who);
  if (data.size() < 2) throw ValidationError(std::string(who) + ": need at least 2 classes");
}

}  // namespace detail

/// Plain FDA: leading C − 1 solutions of Σ_B d = λ Σ_W d.
inline DiscriminantModel fda(const GroupedData& data) {
  detail::check_classes(data, "fda");
  const SymMatrix within = within_scatter(data);
  if (!detail::is_positive_definite(within.matrix())) {
    throw NotApplicableError("fda: within-class scatter is singular (small sample size)");
  }
  const auto counts = detail::class_counts(data);
  const SymMatrix between = between_scatter(detail::class_means(data), counts);
  const Index k = std::min<Index>(static_cast<Index>(data.size()) - 1, within.order());
  auto [vecs, vals] = detail::leading_generalized(between.matrix(), within.matrix(), k);
  return detail::data_model(Method::FDA, data, gram_schmidt(vecs), vals);
}

inline constexpr double kDefaultRegularization = 1e-4;

/// FDA with Σ_W + δE in the denominator.
inline DiscriminantModel reg_lda(const GroupedData& data, double delta = kDefaultRegularization) {
  detail::check_classes(data, "reg_lda");
  if (!(delta > 0.0)) throw ValidationError("reg_lda: delta must be positive");
  const SymMatrix within = within_scatter(data);
  const SymMatrix between = between_scatter(detail::class_means(data), detail::class_counts(data));
  const Matrix reg = within.matrix() + delta * Matrix::Identity(within.order(), within.order());
  const Index k = std::min<Index>(static_cast<Index>(data.size()) - 1, within.order());
  auto [vecs, vals] = detail::leading_generalized(between.matrix(), reg, k);
  return detail::data_model(Method::RegLDA, data, gram_schmidt(vecs), vals);
}

/// PCA on the pooled centered data, then FDA in the reduced space.
///
/// Components are kept until the relative sum of squared residuals is at
/// most `residual_threshold`. If the reduced within-class scatter is still
/// singular the FDA step is regularized with δ = 1e-8 and the model is
/// flagged.
inline DiscriminantModel pca_lda(const GroupedData& data, double residual_threshold) {
  detail::check_classes(data, "pca_lda");
  const Index dim = data.front().samples.rows();
  if (residual_threshold < 0.0 || residual_threshold >= 1.0) {
    throw ValidationError("pca_lda: residual threshold must lie in [0, 1)");
  }
  Index n = 0;
  for (const auto& c : data) n += c.samples.cols();
  if (n < 2) throw ValidationError("pca_lda: need at least 2 samples");

  Matrix pooled(dim, n);
  Index at = 0;
  for (const auto& c : data) {
    pooled.middleCols(at, c.samples.cols()) = c.samples;
    at += c.samples.cols();
  }
  const Vector center = pooled.rowwise().mean();
  pooled.colwise() -= center;
  Eigen::BDCSVD<Matrix> svd(pooled, Eigen::ComputeThinU);
  const Vector ev = svd.singularValues().array().square();
  Index rank = 0;
  while (rank < ev.size() && ev(rank) > kDefaultRankTol * ev(0)) ++rank;
  if (rank == 0) throw NotApplicableError("pca_lda: pooled data has no variance");
  const double total = ev.head(rank).sum();
  Index keep = rank;
  double tail = 0.0;
  for (Index k = rank; k >= 1; --k) {
    // residual after keeping k components is the sum of ev(k..rank-1)
    if (tail / total <= residual_threshold) keep = k;
    else break;
    tail += ev(k - 1);
  }
  const Matrix proj = svd.matrixU().leftCols(keep);

  GroupedData reduced;
  for (const auto& c : data) reduced.push_back({c.label, proj.transpose() * c.samples});
  Matrix within = within_scatter(reduced).matrix();
  const SymMatrix between = between_scatter(detail::class_means(reduced), detail::class_counts(reduced));

  const bool fallback = !detail::is_positive_definite(within);
  if (fallback) within += 1e-8 * Matrix::Identity(keep, keep);
  const Index k = std::min<Index>(static_cast<Index>(data.size()) - 1, keep);
  auto [vecs, vals] = detail::leading_generalized(between.matrix(), within, k);
  DiscriminantModel model = detail::data_model(Method::PcaLDA, data, gram_schmidt((proj * vecs).eval()), vals);
  model.within_fallback = fallback;
  if (fallback) {
    model.warnings.push_back("pca_lda: reduced within-class scatter singular; regularized with delta=1e-8");
  }
  if (k < static_cast<Index>(data.size()) - 1) {
    model.warnings.push_back("pca_lda: only " + std::to_string(keep) + " components kept; fewer than C-1 directions");
  }
  return model;
}

/// Between-class PCA inside the null space of Σ_W.
inline DiscriminantModel null_lda(const GroupedData& data, double null_tol = kDefaultRankTol) {
  detail::check_classes(data, "null_lda");
  const SymMatrix within = within_scatter(data);
  const EigResult eig = sym_eig(within);
  const double largest = eig.values(eig.values.size() - 1);
  std::vector<Index> null_idx;
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values(i) <= null_tol * std::max(largest, 0.0)) null_idx.push_back(i);
  }
  if (null_idx.empty()) {
    throw NotApplicableError("null_lda: within-class scatter has a trivial null space");
  }
  const Matrix null_basis = detail::columns(eig.vectors.matrix(), null_idx);
  const SymMatrix between = between_scatter(detail::class_means(data), detail::class_counts(data));
  const EigResult inner = sym_eig(between.congruence(null_basis));
  const Index q = null_basis.cols();
  const Index k = std::min<Index>(static_cast<Index>(data.size()) - 1, q);
  Matrix top(null_basis.rows(), k);
  Vector vals(k);
  for (Index i = 0; i < k; ++i) {
    top.col(i) = null_basis * inner.vectors.column(q - 1 - i);
    vals(i) = inner.values(q - 1 - i);
  }
  DiscriminantModel model = detail::data_model(Method::NullLDA, data, gram_schmidt(top), vals);
  if (largest <= 0.0) {
    model.warnings.push_back("null_lda: within-class scatter is zero; result is PCA of the between-class scatter");
  }
  return model;
}

}  // namespace gfda
