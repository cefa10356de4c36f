#pragma once

// Dense symmetric-matrix numerics shared by every other module.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gfda/error.hpp"

namespace gfda {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultRankTol = 1e-10;

/// Real symmetric matrix. Symmetry is checked on construction to 1e-12
/// relative to the largest entry and the stored copy is exactly symmetric.
class SymMatrix {
 public:
  static constexpr double kSymmetryTol = 1e-12;

  SymMatrix() = default;

  explicit SymMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) {
      throw ValidationError("SymMatrix: matrix is " + std::to_string(m_.rows()) + "x" +
                            std::to_string(m_.cols()) + ", not square");
    }
    const double scale = m_.size() == 0 ? 0.0 : m_.cwiseAbs().maxCoeff();
    if (!std::isfinite(scale)) throw ValidationError("SymMatrix: non-finite entry");
    const double asym = m_.size() == 0 ? 0.0 : (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol * scale) {
      throw ValidationError("SymMatrix: asymmetry " + std::to_string(asym) +
                            " exceeds tolerance relative to max entry " + std::to_string(scale));
    }
    m_ = 0.5 * (m_ + m_.transpose()).eval();
  }

  static SymMatrix zeros(Index order) { return SymMatrix(Matrix::Zero(order, order)); }
  static SymMatrix identity(Index order) { return SymMatrix(Matrix::Identity(order, order)); }

  /// Sum of outer products of the columns of `vectors`.
  static SymMatrix outer(const Matrix& vectors) {
    Matrix m = Matrix::Zero(vectors.rows(), vectors.rows());
    m.selfadjointView<Eigen::Lower>().rankUpdate(vectors);
    m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    return SymMatrix(std::move(m));
  }

  const Matrix& matrix() const { return m_; }
  Index order() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  double frobenius_norm() const { return m_.norm(); }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_order(o);
    m_ += o.m_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    check_order(o);
    m_ -= o.m_;
    return *this;
  }
  SymMatrix& operator*=(double s) {
    m_ *= s;
    return *this;
  }
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

  /// Congruence transform Bᵀ M B.
  SymMatrix congruence(const Matrix& b) const {
    if (b.rows() != order()) throw ValidationError("SymMatrix::congruence: dimension mismatch");
    const Matrix c = b.transpose() * m_ * b;
    // Symmetric in exact arithmetic; rounding can exceed the relative check
    // when the result is tiny.
    return SymMatrix((0.5 * (c + c.transpose())).eval());
  }

 private:
  void check_order(const SymMatrix& o) const {
    if (o.order() != order()) throw ValidationError("SymMatrix: order mismatch");
  }

  Matrix m_;
};

/// Orthonormal set of column vectors in an ambient space. May be empty.
class OrthoBasis {
 public:
  static constexpr double kOrthogonalityTol = 1e-10;
  static constexpr double kNormTol = 1e-12;

  OrthoBasis() = default;

  explicit OrthoBasis(Matrix columns) : q_(std::move(columns)) {
    if (q_.rows() == 0) throw ValidationError("OrthoBasis: ambient dimension must be positive");
    if (q_.cols() == 0) return;
    const Matrix gram = q_.transpose() * q_;
    for (Index j = 0; j < gram.cols(); ++j) {
      if (std::abs(std::sqrt(gram(j, j)) - 1.0) > kNormTol) {
        throw ValidationError("OrthoBasis: column " + std::to_string(j) + " is not unit length");
      }
      for (Index i = 0; i < j; ++i) {
        if (std::abs(gram(i, j)) > kOrthogonalityTol) {
          throw ValidationError("OrthoBasis: columns " + std::to_string(i) + " and " +
                                std::to_string(j) + " are not orthogonal");
        }
      }
    }
  }

  static OrthoBasis empty(Index ambient_dim) { return OrthoBasis(Matrix(ambient_dim, 0)); }

  const Matrix& matrix() const { return q_; }
  Index ambient_dim() const { return q_.rows(); }
  Index dim() const { return q_.cols(); }
  bool is_empty() const { return q_.cols() == 0; }
  auto column(Index i) const { return q_.col(i); }

 private:
  Matrix q_;
};

struct EigResult {
  Vector values;        // ascending
  OrthoBasis vectors;   // column i pairs with values(i)
};

namespace detail {

/// Flip columns so that the first component with magnitude above `tol` is
/// positive.
template <class Derived>
void fix_signs(Eigen::MatrixBase<Derived>& v, double tol = 1e-12) {
  for (Index j = 0; j < v.cols(); ++j) {
    for (Index i = 0; i < v.rows(); ++i) {
      if (std::abs(v(i, j)) > tol) {
        if (v(i, j) < 0.0) v.col(j) *= -1.0;
        break;
      }
    }
  }
}

/// Re-normalize columns that Eigen returned with norm drift.
inline void normalize_columns(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    const double n = v.col(j).norm();
    if (n > 0.0) v.col(j) /= n;
  }
}

}  // namespace detail

/// Full symmetric eigendecomposition, ascending, with deterministic signs.
inline EigResult sym_eig(const SymMatrix& m) {
  if (m.order() == 0) throw ValidationError("sym_eig: empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) throw DegenerateError("sym_eig: eigensolver did not converge");
  Matrix vectors = solver.eigenvectors();
  detail::normalize_columns(vectors);
  detail::fix_signs(vectors);
  return {solver.eigenvalues(), OrthoBasis(std::move(vectors))};
}

/// Rank-revealing modified Gram-Schmidt with one re-orthogonalization pass.
/// A vector is dropped when its residual norm falls below tol times its
/// original norm.
inline OrthoBasis gram_schmidt(const Matrix& vectors, double tol = kDefaultRankTol) {
  if (vectors.cols() == 0 || vectors.rows() == 0) {
    throw ValidationError("gram_schmidt: no input vectors");
  }
  Matrix q(vectors.rows(), vectors.cols());
  Index kept = 0;
  for (Index j = 0; j < vectors.cols(); ++j) {
    Vector v = vectors.col(j);
    const double original = v.norm();
    if (original == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < kept; ++i) v -= q.col(i).dot(v) * q.col(i);
    }
    const double residual = v.norm();
    if (residual < tol * original) continue;
    q.col(kept++) = v / residual;
  }
  return OrthoBasis(q.leftCols(kept).eval());
}

inline OrthoBasis gram_schmidt(std::span<const Vector> vectors, double tol = kDefaultRankTol) {
  if (vectors.empty()) throw ValidationError("gram_schmidt: no input vectors");
  Matrix m(vectors.front().size(), static_cast<Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != m.rows()) throw ValidationError("gram_schmidt: ambient dimensions differ");
    m.col(static_cast<Index>(j)) = vectors[j];
  }
  return gram_schmidt(m, tol);
}

struct CanonicalAngles {
  Vector cosines;    // descending, in [0, 1]
  Matrix u_vectors;  // canonical vectors in the first subspace
  Matrix v_vectors;  // paired canonical vectors in the second subspace
};

/// Canonical angles from the SVD of the cross inner-product matrix UᵀV.
inline CanonicalAngles canonical_angles(const OrthoBasis& u, const OrthoBasis& v) {
  if (u.ambient_dim() != v.ambient_dim()) {
    throw ValidationError("canonical_angles: ambient dimensions " + std::to_string(u.ambient_dim()) +
                          " and " + std::to_string(v.ambient_dim()) + " differ");
  }
  const Index k = std::min(u.dim(), v.dim());
  CanonicalAngles out;
  if (k == 0) {
    out.cosines.resize(0);
    out.u_vectors.resize(u.ambient_dim(), 0);
    out.v_vectors.resize(u.ambient_dim(), 0);
    return out;
  }
  const Matrix cross = u.matrix().transpose() * v.matrix();
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.cosines = svd.singularValues().head(k).cwiseMin(1.0).cwiseMax(0.0);
  out.u_vectors = u.matrix() * svd.matrixU().leftCols(k);
  out.v_vectors = v.matrix() * svd.matrixV().leftCols(k);
  return out;
}

struct Whitening {
  Matrix map;             // L x r, satisfies mapᵀ S map = I_r
  Vector retained;        // retained eigenvalues of S, descending
  Index rank() const { return map.cols(); }
};

/// A = V_r Λ_r^{-1/2} over eigenvalues above rank_tol times the largest.
/// Columns are ordered by descending eigenvalue.
inline Whitening whitening(const SymMatrix& s, double rank_tol = kDefaultRankTol) {
  const EigResult eig = sym_eig(s);
  const double fro = s.frobenius_norm();
  if (eig.values(0) < -rank_tol * fro) {
    throw ValidationError("whitening: matrix has eigenvalue " + std::to_string(eig.values(0)) +
                          ", not positive semidefinite");
  }
  const double largest = eig.values(eig.values.size() - 1);
  std::vector<Index> order(static_cast<std::size_t>(eig.values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return eig.values(a) > eig.values(b); });
  std::vector<Index> kept;
  for (Index i : order) {
    if (largest > 0.0 && eig.values(i) > rank_tol * largest) kept.push_back(i);
  }
  Whitening w;
  w.map.resize(s.order(), static_cast<Index>(kept.size()));
  w.retained.resize(static_cast<Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const double lambda = eig.values(kept[j]);
    w.map.col(static_cast<Index>(j)) = eig.vectors.column(kept[j]) / std::sqrt(lambda);
    w.retained(static_cast<Index>(j)) = lambda;
  }
  return w;
}

struct EigenPair {
  double value = 0.0;
  Vector vector;
  int iterations = 0;
};

/// Power iteration for the eigenpair of largest magnitude. Intended for
/// matrices with a clear spectral gap; callers own that assumption.
template <class Apply>
EigenPair dominant_eigenpair(Apply&& apply, Vector start, double tol = 1e-14, int max_iter = 10000) {
  if (start.norm() == 0.0) throw ValidationError("dominant_eigenpair: zero start vector");
  EigenPair out;
  Vector v = start.normalized();
  double value = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vector w = apply(v);
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) break;
    w /= norm;
    const double change = std::min((w - v).norm(), (w + v).norm());
    v = std::move(w);
    value = next;
    out.iterations = it;
    if (change < tol) break;
  }
  detail::fix_signs(v);
  out.value = value;
  out.vector = std::move(v);
  return out;
}

inline EigenPair dominant_eigenpair(const SymMatrix& m, double tol = 1e-14, int max_iter = 10000) {
  Vector start = Vector::LinSpaced(m.order(), 1.0, 2.0);
  return dominant_eigenpair([&](const Vector& x) -> Vector { return m.matrix() * x; }, start, tol,
                            max_iter);
}

/// Orthonormal basis of the column span of `vectors`, from the thin SVD.
/// Directions whose squared singular value falls below rank_tol times the
/// largest are dropped.
inline OrthoBasis column_span(const Matrix& vectors, double rank_tol = kDefaultRankTol) {
  if (vectors.rows() == 0) throw ValidationError("column_span: empty ambient space");
  if (vectors.cols() == 0) return OrthoBasis::empty(vectors.rows());
  Eigen::BDCSVD<Matrix> svd(vectors, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  const double top = s.size() > 0 ? s(0) : 0.0;
  Index r = 0;
  while (r < s.size() && top > 0.0 && s(r) * s(r) > rank_tol * top * top) ++r;
  Matrix q = svd.matrixU().leftCols(r);
  detail::normalize_columns(q);
  return OrthoBasis(std::move(q));
}

}  // namespace gfda
