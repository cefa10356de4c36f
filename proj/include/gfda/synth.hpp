#pragma once

// Seeded generators for the synthetic experiments.
//
// Every draw goes through Rng, which fixes the algorithm for uniforms,
// normals and gammas on top of mt19937_64 (whose output the standard pins
// down). The std::*_distribution classes are implementation-defined and are
// not used, so a seed gives the same numbers with any standard library.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gfda/fisher.hpp"

namespace gfda::synth {

/// Bumped whenever any generator below changes its output for a given seed.
inline constexpr int kGeneratorVersion = 1;

/// splitmix64 finalizer; derives independent stream seeds.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u = 0.0;
    while (u == 0.0) u = uniform();
    return u;
  }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t b = bits();
    while (b >= limit) b = bits();
    return b % n;
  }

  /// Standard normal, Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  double exponential() { return -std::log(uniform_open()); }

  /// Gamma(shape, 1), Marsaglia–Tsang.
  double gamma(double shape) {
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      const double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform_open();
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
  }

  double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

  Vector normal_vector(Index n) {
    Vector out(n);
    for (Index i = 0; i < n; ++i) out(i) = normal();
    return out;
  }

  Matrix normal_matrix(Index rows, Index cols) {
    Matrix out(rows, cols);
    for (Index j = 0; j < cols; ++j) {
      for (Index i = 0; i < rows; ++i) out(i, j) = normal();
    }
    return out;
  }

  Vector unit_vector(Index n) {
    Vector v = normal_vector(n);
    double norm = v.norm();
    while (norm == 0.0) {
      v = normal_vector(n);
      norm = v.norm();
    }
    return v / norm;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Per-axis deviations of gaussian_class: all σ_max, or σ_max / k on axis k.
enum class Spread { Isotropic, Harmonic };

/// n draws from N(mean_norm·u, diag(σ_k²)) with u = mean_direction/‖mean_direction‖.
inline Matrix gaussian_class(Index dim, const Vector& mean_direction, double mean_norm, double sigma_max, Index n,
                             std::uint64_t seed, Spread spread = Spread::Harmonic) {
  if (dim < 1 || mean_direction.size() != dim) throw ValidationError("gaussian_class: mean direction has wrong size");
  if (mean_norm < 0.0 || sigma_max < 0.0 || n < 1) {
    throw ValidationError("gaussian_class: need mean_norm >= 0, sigma_max >= 0, n >= 1");
  }
  const double dnorm = mean_direction.norm();
  if (mean_norm > 0.0 && !(dnorm > 0.0)) throw ValidationError("gaussian_class: zero mean direction");
  const Vector mean = mean_norm > 0.0 ? Vector(mean_norm / dnorm * mean_direction) : Vector(Vector::Zero(dim));
  Vector sigma(dim);
  for (Index k = 0; k < dim; ++k) {
    sigma(k) = spread == Spread::Isotropic ? sigma_max : sigma_max / static_cast<double>(k + 1);
  }
  Rng rng(seed);
  Matrix out(dim, n);
  for (Index j = 0; j < n; ++j) out.col(j) = mean + sigma.cwiseProduct(rng.normal_vector(dim));
  return out;
}

/// Sufficient statistics of n isotropic Gaussian draws, generated directly.
///
/// For x ~ N(m, σ²E) the sample mean m̂ and the scatter S about it are
/// independent, with m̂ ~ N(m, σ²E/n) and S Wishart with n − 1 degrees of
/// freedom. The autocorrelation matrix is R = (a aᵀ + σ² T Tᵀ)/n with
/// a = √n m̂ and T the lower-triangular Bartlett factor of S/σ². Drawing these
/// costs O(L²) instead of O(nL).
struct AutocorrelationMoments {
  Vector sample_mean;
  Vector a;
  Matrix bartlett;   // lower triangular
  double sigma = 1.0;
  Index n = 0;

  /// R v.
  Vector apply(const Vector& v) const {
    const Vector tv = bartlett.triangularView<Eigen::Lower>().transpose() * v;
    const Vector ttv = bartlett.triangularView<Eigen::Lower>() * tv;
    return (a * a.dot(v) + sigma * sigma * ttv) / static_cast<double>(n);
  }

  Matrix autocorrelation() const {
    const Matrix t = bartlett.triangularView<Eigen::Lower>();
    return (a * a.transpose() + sigma * sigma * t * t.transpose()) / static_cast<double>(n);
  }
};

inline AutocorrelationMoments autocorrelation_moments(const Vector& mean, double sigma, Index n, std::uint64_t seed) {
  const Index dim = mean.size();
  if (dim < 1 || n <= dim || !(sigma > 0.0)) {
    throw ValidationError("autocorrelation_moments: need n > L and sigma > 0");
  }
  Rng rng(seed);
  AutocorrelationMoments out;
  out.n = n;
  out.sigma = sigma;
  const double root_n = std::sqrt(static_cast<double>(n));
  out.sample_mean = mean + (sigma / root_n) * rng.normal_vector(dim);
  out.a = root_n * out.sample_mean;
  out.bartlett = Matrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    out.bartlett(i, i) = std::sqrt(rng.chi_square(static_cast<double>(n - 1 - i)));
    for (Index j = 0; j < i; ++j) out.bartlett(i, j) = rng.normal();
  }
  return out;
}

/// One trial of the first-eigenvector-versus-mean comparison: cosine between
/// the leading eigenvector of the autocorrelation matrix and the sample mean
/// of n isotropic draws around a mean of norm ratio·σ.
inline double heuristic_trial(Index dim, double ratio, Index n, std::uint64_t seed) {
  Rng dir(derive_seed(seed, 0));
  const Vector mean = ratio * dir.unit_vector(dim);
  const AutocorrelationMoments mom = autocorrelation_moments(mean, 1.0, n, derive_seed(seed, 1));
  const EigenPair top = dominant_eigenpair([&](const Vector& v) { return mom.apply(v); }, mom.sample_mean);
  return std::abs(top.vector.dot(mom.sample_mean)) / mom.sample_mean.norm();
}

/// Nonnegative weights summing to one, uniform on the simplex.
inline Vector simplex_draw(Rng& rng, Index k) {
  Vector c(k);
  for (Index i = 0; i < k; ++i) c(i) = rng.exponential();
  return c / c.sum();
}

enum class MixtureMode { Set1, Set2 };

struct MixtureDraw {
  Matrix samples;        // L × count, unit columns
  Matrix coefficients;   // k × count
  std::vector<Index> anchors;   // Set2: anchored basis index per sample
  Index resamples = 0;
};

/// Convex combinations of unit basis vectors, renormalized.
///
/// Set1: S′ = 5·L_m + Σ cᵢLᵢ with L_m the mean of the basis vectors.
/// Set2: S′ = 2·L_j + Σ_{i≠j} cᵢLᵢ for a uniformly chosen j.
/// The cᵢ are uniform on the simplex, drawn as normalized exponentials.
inline MixtureDraw convex_mixture(const Matrix& basis, MixtureMode mode, Index count, std::uint64_t seed) {
  const Index k = basis.cols();
  if (k < 2) throw ValidationError("convex_mixture: need at least 2 basis vectors");
  if (count < 0) throw ValidationError("convex_mixture: negative count");
  for (Index i = 0; i < k; ++i) {
    if (std::abs(basis.col(i).norm() - 1.0) > 1e-10) throw ValidationError("convex_mixture: basis vectors must be unit length");
  }
  Rng rng(seed);
  const Vector anchor_mean = basis.rowwise().mean();
  MixtureDraw out;
  out.samples.resize(basis.rows(), count);
  out.coefficients = Matrix::Zero(k, count);
  for (Index s = 0; s < count; ++s) {
    for (;;) {
      Vector c = Vector::Zero(k);
      Vector raw;
      Index j = -1;
      if (mode == MixtureMode::Set1) {
        c = simplex_draw(rng, k);
        raw = 5.0 * anchor_mean + basis * c;
      } else {
        j = static_cast<Index>(rng.index(static_cast<std::uint64_t>(k)));
        const Vector rest = simplex_draw(rng, k - 1);
        for (Index i = 0, at = 0; i < k; ++i) {
          if (i != j) c(i) = rest(at++);
        }
        raw = 2.0 * basis.col(j) + basis * c;
      }
      const double norm = raw.norm();
      if (!(norm > 1e-12)) {
        ++out.resamples;
        continue;
      }
      out.samples.col(s) = raw / norm;
      out.coefficients.col(s) = c;
      if (j >= 0) out.anchors.push_back(j);
      break;
    }
  }
  return out;
}

/// Random orthonormal L × N basis (Haar distributed).
inline Matrix random_basis(Rng& rng, Index dim, Index n) {
  const Eigen::HouseholderQR<Matrix> qr(rng.normal_matrix(dim, n));
  Matrix q = qr.householderQ() * Matrix::Identity(dim, n);
  // Positive diagonal in R makes Q unique, hence Haar.
  for (Index j = 0; j < n; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

/// C random N-dimensional class subspaces in L dimensions.
///
/// Each class basis is the orthonormalized blend s·Z_c + (1 − s)·S of an
/// independent Haar basis Z_c and one shared basis S, s = separation. At
/// s = 1 the classes are independent uniform-random subspaces; as s shrinks
/// they collapse onto S.
inline SubspaceEnsemble subspace_config(Index classes, Index n, Index dim, double separation, std::uint64_t seed) {
  if (classes < 2 || n < 1) throw ValidationError("subspace_config: need C >= 2 and N >= 1");
  if (classes * n > dim) throw ValidationError("subspace_config: C*N exceeds L, class subspaces must overlap");
  if (!(separation > 0.0 && separation <= 1.0)) throw ValidationError("subspace_config: separation must lie in (0, 1]");
  Rng shared_rng(derive_seed(seed, 0));
  const Matrix shared = random_basis(shared_rng, dim, n);
  std::vector<ClassModel> models;
  for (Index c = 0; c < classes; ++c) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c) + 1));
    const Matrix own = random_basis(rng, dim, n);
    const Matrix blend = separation * own + (1.0 - separation) * shared;
    Matrix q = Eigen::HouseholderQR<Matrix>(blend).householderQ() * Matrix::Identity(dim, n);
    detail::fix_signs(q);
    models.push_back(class_from_basis("c" + std::to_string(c), OrthoBasis(std::move(q))));
  }
  return SubspaceEnsemble(std::move(models));
}

/// Unit basis vectors of synthetic "subjects" under k "lighting conditions".
///
/// Vector i of class c is normalize(w·f + u_c + spread·ℓᵢ + individual·ε_ci),
/// with f a vector common to all classes, u_c a class identity vector, ℓᵢ a
/// lighting vector shared by all classes and ε_ci the class's own response to
/// that light. Without ε all classes live in one (1 + C + k)-dim space and
/// their subspaces overlap. Returns one L × k matrix per class.
struct LightingSpec {
  Index classes = 10;
  Index dim = 200;
  Index lights = 9;
  double common = 1.0;
  double spread = 1.0;
  double individual = 0.5;
};

inline std::vector<Matrix> lighting_bases(const LightingSpec& spec, std::uint64_t seed) {
  if (spec.classes < 2 || spec.dim < 2 || spec.lights < 2) {
    throw ValidationError("lighting_bases: need at least 2 classes, 2 dimensions and 2 lights");
  }
  Rng rng(seed);
  const Vector face = rng.unit_vector(spec.dim);
  std::vector<Vector> lights;
  for (Index i = 0; i < spec.lights; ++i) lights.push_back(rng.unit_vector(spec.dim));
  std::vector<Matrix> out;
  for (Index c = 0; c < spec.classes; ++c) {
    const Vector identity = rng.unit_vector(spec.dim);
    Matrix basis(spec.dim, spec.lights);
    for (Index i = 0; i < spec.lights; ++i) {
      const Vector v = spec.common * face + identity + spec.spread * lights[static_cast<std::size_t>(i)] +
                       spec.individual * rng.unit_vector(spec.dim);
      basis.col(i) = v / v.norm();
    }
    out.push_back(std::move(basis));
  }
  return out;
}

/// Convex-mixture samples for every class, labeled "s0", "s1", ...
inline GroupedData mixture_dataset(const std::vector<Matrix>& bases, MixtureMode mode, Index per_class,
                                   std::uint64_t seed) {
  GroupedData out;
  for (std::size_t c = 0; c < bases.size(); ++c) {
    out.push_back({"s" + std::to_string(c),
                   convex_mixture(bases[c], mode, per_class, derive_seed(seed, c)).samples});
  }
  return out;
}

}  // namespace gfda::synth
