#pragma once

// Class subspaces from uncentered PCA, and the difference subspace of a pair.

#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gfda/linalg.hpp"

namespace gfda {

/// Keep exactly `dim` leading eigenvectors.
struct FixedDim {
  Index dim = 1;
};

/// Keep the fewest leading eigenvectors whose eigenvalues account for at
/// least `fraction` of the trace of R_c.
struct EnergyThreshold {
  double fraction = 0.99;
};

using DimRule = std::variant<FixedDim, EnergyThreshold>;

/// One class's uncentered-PCA result.
struct ClassModel {
  std::string label;
  OrthoBasis basis;       // leading eigenvectors of R_c; column 0 points toward the mean
  Vector eigenvalues;     // nonincreasing, one per basis column
  Vector mean;            // empty for classes built from a bare basis
  Index count = 0;        // number of samples; 0 for bare bases

  // Every numerically nonzero eigenpair of R_c, nonincreasing. Needed by
  // the scatter ladder, which uses the full spectrum.
  OrthoBasis spectrum_basis;
  Vector spectrum;

  Diagnostics warnings;

  Index dim() const { return basis.dim(); }
  Index ambient_dim() const { return basis.ambient_dim(); }
  bool has_samples() const { return count > 0; }
  Vector first_basis() const { return basis.column(0); }
};

/// Uncentered PCA of `samples` (one sample per column).
///
/// R_c = (1/n) Σ x xᵀ is never formed: its eigenpairs come from the thin SVD
/// of the sample matrix, which costs O(L n min(L, n)) and is accurate for the
/// small trailing eigenvalues. A fixed dimension larger than the numerical
/// rank of the samples is truncated to that rank with a warning.
inline ClassModel fit_class(std::string label, const Matrix& samples, DimRule rule = FixedDim{1},
                            double rank_tol = kDefaultRankTol) {
  const Index dim = samples.rows();
  const Index n = samples.cols();
  if (n == 0) throw ValidationError("fit_class(" + label + "): no samples");
  if (dim == 0) throw ValidationError("fit_class(" + label + "): zero-dimensional samples");
  if (!samples.allFinite()) throw ValidationError("fit_class(" + label + "): non-finite sample value");
  if (samples.cwiseAbs().maxCoeff() == 0.0) {
    throw ValidationError("fit_class(" + label + "): every sample is the zero vector");
  }

  ClassModel model;
  model.label = std::move(label);
  model.count = n;
  model.mean = samples.rowwise().mean();

  Eigen::BDCSVD<Matrix> svd(samples, Eigen::ComputeThinU);
  const Vector eig_all = svd.singularValues().array().square() / static_cast<double>(n);
  Index rank = 0;
  while (rank < eig_all.size() && eig_all(rank) > rank_tol * eig_all(0)) ++rank;

  Matrix vectors = svd.matrixU().leftCols(rank);
  detail::normalize_columns(vectors);
  detail::fix_signs(vectors);
  if (vectors.col(0).dot(model.mean) < 0.0) vectors.col(0) *= -1.0;

  Index keep = 0;
  if (const auto* fixed = std::get_if<FixedDim>(&rule)) {
    if (fixed->dim < 1 || fixed->dim > std::min(n, dim)) {
      throw ValidationError("fit_class(" + model.label + "): dimension " + std::to_string(fixed->dim) +
                            " outside [1, min(n_c, L)] = [1, " + std::to_string(std::min(n, dim)) + "]");
    }
    keep = fixed->dim;
    if (keep > rank) {
      model.warnings.push_back("fit_class(" + model.label + "): requested dimension " +
                               std::to_string(keep) + " exceeds sample rank " + std::to_string(rank) +
                               "; truncated");
      keep = rank;
    }
  } else {
    const double fraction = std::get<EnergyThreshold>(rule).fraction;
    if (!(fraction > 0.0 && fraction <= 1.0)) {
      throw ValidationError("fit_class: energy fraction must lie in (0, 1]");
    }
    const double total = eig_all.head(rank).sum();
    double acc = 0.0;
    while (keep < rank) {
      acc += eig_all(keep++);
      if (acc >= fraction * total * (1.0 - 1e-12)) break;
    }
  }

  model.spectrum_basis = OrthoBasis(vectors);
  model.spectrum = eig_all.head(rank);
  model.basis = OrthoBasis(vectors.leftCols(keep).eval());
  model.eigenvalues = eig_all.head(keep);
  return model;
}

/// Class model for a known subspace with no sample statistics.
inline ClassModel class_from_basis(std::string label, OrthoBasis basis) {
  if (basis.is_empty()) throw ValidationError("class_from_basis(" + label + "): empty basis");
  ClassModel model;
  model.label = std::move(label);
  model.eigenvalues = Vector::Ones(basis.dim());
  model.spectrum_basis = basis;
  model.spectrum = model.eigenvalues;
  model.basis = std::move(basis);
  return model;
}

/// P = Φ Φᵀ.
inline SymMatrix projection_matrix(const OrthoBasis& basis) { return SymMatrix::outer(basis.matrix()); }
inline SymMatrix projection_matrix(const ClassModel& c) { return projection_matrix(c.basis); }

/// The C class models of a discrimination problem.
///
/// First basis vectors of classes without samples carry no orientation of
/// their own; they are flipped so that φ₁ᶜᵀφ₁¹ ≥ 0 against the first class.
/// Fitted classes keep the orientation toward their mean.
class SubspaceEnsemble {
 public:
  explicit SubspaceEnsemble(std::vector<ClassModel> classes) : classes_(std::move(classes)) {
    if (classes_.size() < 2) throw ValidationError("SubspaceEnsemble: need at least 2 classes");
    std::set<std::string> seen;
    for (const auto& c : classes_) {
      if (c.basis.is_empty()) throw ValidationError("SubspaceEnsemble: class " + c.label + " has empty basis");
      if (c.ambient_dim() != classes_.front().ambient_dim()) {
        throw ValidationError("SubspaceEnsemble: class " + c.label + " has ambient dimension " +
                              std::to_string(c.ambient_dim()) + ", expected " +
                              std::to_string(classes_.front().ambient_dim()));
      }
      if (!seen.insert(c.label).second) throw ValidationError("SubspaceEnsemble: duplicate label " + c.label);
    }
    const Vector reference = classes_.front().first_basis();
    for (std::size_t j = 1; j < classes_.size(); ++j) {
      ClassModel& c = classes_[j];
      if (c.has_samples() || reference.dot(c.first_basis()) >= 0.0) continue;
      Matrix flipped = c.basis.matrix();
      flipped.col(0) *= -1.0;
      c.basis = OrthoBasis(std::move(flipped));
    }
  }

  const std::vector<ClassModel>& classes() const { return classes_; }
  const ClassModel& operator[](std::size_t i) const { return classes_[i]; }
  std::size_t size() const { return classes_.size(); }
  Index class_count() const { return static_cast<Index>(classes_.size()); }
  Index ambient_dim() const { return classes_.front().ambient_dim(); }

  Index total_dim() const {
    Index n = 0;
    for (const auto& c : classes_) n += c.dim();
    return n;
  }

  /// All class bases side by side, L × ΣN_c.
  Matrix pooled_basis() const {
    Matrix m(ambient_dim(), total_dim());
    Index at = 0;
    for (const auto& c : classes_) {
      m.middleCols(at, c.dim()) = c.basis.matrix();
      at += c.dim();
    }
    return m;
  }

  /// First basis vectors as columns, L × C.
  Matrix first_basis_matrix() const {
    Matrix m(ambient_dim(), class_count());
    for (Index c = 0; c < class_count(); ++c) m.col(c) = classes_[static_cast<std::size_t>(c)].first_basis();
    return m;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& c : classes_) out.push_back(c.label);
    return out;
  }

 private:
  std::vector<ClassModel> classes_;
};

/// Eigendecomposition of Σ_c P_c restricted to the sum subspace.
///
/// Outside the span of the pooled class bases every P_c vanishes, so those
/// directions are excluded: the returned eigenvalues are the nonzero ones.
struct SumSpaceEig {
  OrthoBasis span;     // L × r orthonormal basis of the sum subspace
  Vector values;       // ascending, size r
  OrthoBasis vectors;  // L × r, paired with values
};

inline SumSpaceEig sum_space_eig(const Matrix& pooled, double rank_tol = kDefaultRankTol) {
  SumSpaceEig out;
  out.span = column_span(pooled, rank_tol);
  if (out.span.is_empty()) throw DegenerateError("sum_space_eig: pooled bases span nothing");
  const Matrix coords = out.span.matrix().transpose() * pooled;
  const EigResult eig = sym_eig(SymMatrix::outer(coords));
  Matrix lifted = out.span.matrix() * eig.vectors.matrix();
  detail::normalize_columns(lifted);
  detail::fix_signs(lifted);
  out.values = eig.values;
  out.vectors = OrthoBasis(std::move(lifted));
  return out;
}

/// Difference subspace from canonical vector pairs: dᵢ = (vᵢ − uᵢ)/‖vᵢ − uᵢ‖.
/// Throws DegenerateError when a canonical cosine is within `tol` of 1.
inline OrthoBasis difference_subspace_geometric(const OrthoBasis& a, const OrthoBasis& b,
                                                double tol = 1e-8) {
  const CanonicalAngles ca = canonical_angles(a, b);
  if (ca.cosines.size() == 0) throw ValidationError("difference_subspace_geometric: empty subspace");
  Matrix d(a.ambient_dim(), ca.cosines.size());
  for (Index i = 0; i < ca.cosines.size(); ++i) {
    if (ca.cosines(i) >= 1.0 - tol) {
      throw DegenerateError("difference_subspace_geometric: canonical pair " + std::to_string(i) +
                            " coincides (cosine " + std::to_string(ca.cosines(i)) + ")");
    }
    const Vector diff = ca.v_vectors.col(i) - ca.u_vectors.col(i);
    d.col(i) = diff / diff.norm();
  }
  return OrthoBasis(std::move(d));
}

inline OrthoBasis difference_subspace_geometric(const ClassModel& a, const ClassModel& b, double tol = 1e-8) {
  return difference_subspace_geometric(a.basis, b.basis, tol);
}

struct DifferenceSubspace {
  OrthoBasis difference;   // eigenvalues of P₁+P₂ below 1 − tol, ascending
  OrthoBasis principal;    // eigenvalues above 1 + tol, ascending
  Vector eigenvalues;      // every eigenvalue on the sum subspace, ascending
  Index unit_count = 0;    // eigenvalues within tol of 1
  Diagnostics warnings;
};

/// Difference subspace as the eigenvectors of P₁ + P₂ below 1.
///
/// |M − N| eigenvalues equal to 1 are expected (the part of the larger
/// subspace with no partner). Any beyond that belong to orthogonal canonical
/// pairs, where the eigenproblem cannot separate difference from principal
/// directions; they are excluded from both sides with a warning.
inline DifferenceSubspace difference_subspace_analytic(const OrthoBasis& a, const OrthoBasis& b,
                                                       double tol = 1e-8) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw ValidationError("difference_subspace_analytic: ambient dimensions differ");
  }
  if (a.is_empty() || b.is_empty()) throw ValidationError("difference_subspace_analytic: empty subspace");
  Matrix pooled(a.ambient_dim(), a.dim() + b.dim());
  pooled << a.matrix(), b.matrix();
  const SumSpaceEig eig = sum_space_eig(pooled);

  DifferenceSubspace out;
  out.eigenvalues = eig.values;
  std::vector<Index> diff, prin;
  for (Index i = 0; i < eig.values.size(); ++i) {
    const double lambda = eig.values(i);
    if (lambda < 1.0 - tol) {
      diff.push_back(i);
    } else if (lambda > 1.0 + tol) {
      prin.push_back(i);
    } else {
      ++out.unit_count;
    }
  }
  const Index expected_unit = std::abs(a.dim() - b.dim());
  if (out.unit_count > expected_unit) {
    out.warnings.push_back("difference_subspace_analytic: " + std::to_string(out.unit_count - expected_unit) +
                           " eigenvalue(s) of P1+P2 at 1 (orthogonal canonical pairs) excluded");
  }
  const Index pairs = std::min(a.dim(), b.dim());
  if (static_cast<Index>(diff.size()) < pairs && !diff.empty()) {
    out.warnings.push_back("difference_subspace_analytic: only " + std::to_string(diff.size()) + " of " +
                           std::to_string(pairs) + " canonical pairs yield difference directions");
  }
  if (diff.empty()) {
    throw DegenerateError("difference_subspace_analytic: no eigenvalue of P1+P2 below 1; subspaces overlap");
  }
  auto take = [&](const std::vector<Index>& idx) {
    Matrix m(a.ambient_dim(), static_cast<Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) m.col(static_cast<Index>(j)) = eig.vectors.column(idx[j]);
    return OrthoBasis(std::move(m));
  };
  out.difference = take(diff);
  out.principal = take(prin);
  return out;
}

inline DifferenceSubspace difference_subspace_analytic(const ClassModel& a, const ClassModel& b,
                                                       double tol = 1e-8) {
  return difference_subspace_analytic(a.basis, b.basis, tol);
}

}  // namespace gfda
