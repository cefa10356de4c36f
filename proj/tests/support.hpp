#pragma once

#include <gtest/gtest.h>

#include "gfda/synth.hpp"

namespace gfda::test {

inline Matrix random_orthonormal(std::uint64_t seed, Index dim, Index n) {
  synth::Rng rng(seed);
  return synth::random_basis(rng, dim, n);
}

inline Matrix random_matrix(std::uint64_t seed, Index rows, Index cols) {
  synth::Rng rng(seed);
  return rng.normal_matrix(rows, cols);
}

// Cosines of the canonical angles from the eigenvalues of UᵀV VᵀU, an
// independent route from the SVD used by the library.
inline Vector cosines_by_eig(const Matrix& u, const Matrix& v) {
  const Matrix m = u.transpose() * v * v.transpose() * u;
  Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(m).eigenvalues().reverse();
  ev = ev.cwiseMax(0.0).cwiseSqrt().cwiseMin(1.0);
  return ev.head(std::min(u.cols(), v.cols()));
}

// Smallest canonical cosine between two equal-dimension spans.
inline double span_agreement(const Matrix& u, const Matrix& v) {
  if (u.cols() != v.cols()) return 0.0;
  return cosines_by_eig(u, v).minCoeff();
}

inline double rel_error(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

inline GroupedData gaussian_groups(std::uint64_t seed, Index classes, Index dim, Index per_class, double mean_norm,
                                   double sigma) {
  GroupedData data;
  synth::Rng rng(seed);
  for (Index c = 0; c < classes; ++c) {
    const Vector dir = rng.unit_vector(dim);
    data.push_back({"k" + std::to_string(c),
                    synth::gaussian_class(dim, dir, mean_norm, sigma, per_class, synth::derive_seed(seed, c),
                                          synth::Spread::Isotropic)});
  }
  return data;
}

}  // namespace gfda::test
