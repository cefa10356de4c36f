#pragma once

// Generalized difference subspace: the directions in which the sum of the
// class projection matrices is smallest.

#include <variant>

#include "gfda/fisher.hpp"

namespace gfda {

/// Keep a fixed number of directions.
struct FixedCount {
  Index count = 1;
};

/// Keep the fewest directions whose cumulative f_g power reaches
/// C(C − 1)·gamma.
struct PowerThreshold {
  double gamma = 0.90;
};

using GdsRule = std::variant<FixedCount, PowerThreshold>;

struct GdsSelection {
  std::optional<double> gamma;
  std::optional<double> beta;
  double achieved_power = 0.0;
  Index dim = 0;
};

struct GdsModel {
  OrthoBasis basis;             // N_d columns
  Vector eigenvalues;           // of G, ascending, paired with basis
  std::vector<double> power;    // f_g of every selected direction
  GdsSelection selection;
};

/// Eigenvectors of G for its N_d smallest nonzero eigenvalues.
inline GdsModel gds(const SubspaceEnsemble& ensemble, GdsRule rule = PowerThreshold{}) {
  const SumSpaceEig eig = sum_space_eig(ensemble.pooled_basis());
  const Index r = eig.values.size();
  GdsModel model;

  if (const auto* fixed = std::get_if<FixedCount>(&rule)) {
    if (fixed->count < 1 || fixed->count > r) {
      throw ValidationError("gds: N_d = " + std::to_string(fixed->count) + " outside [1, " + std::to_string(r) +
                            "], the number of nonzero eigenvalues of G");
    }
    model.selection.dim = fixed->count;
  } else {
    const double gamma = std::get<PowerThreshold>(rule).gamma;
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gds: gamma must lie in (0, 1]");
    const double c = static_cast<double>(ensemble.class_count());
    const double beta = c * (c - 1.0) * gamma;
    model.selection.gamma = gamma;
    model.selection.beta = beta;
    const Matrix diffs = pairwise_differences(ensemble.first_basis_matrix());
    double cumulative = 0.0;
    Index k = 0;
    // dᵢᵀ G dᵢ = λᵢ for an eigenvector, so f_g needs only Σ_B3.
    while (k < r && cumulative < beta * (1.0 - 1e-12)) {
      cumulative += (diffs.transpose() * eig.vectors.column(k)).squaredNorm() / eig.values(k);
      ++k;
    }
    model.selection.dim = k;
  }

  const Index k = model.selection.dim;
  model.basis = OrthoBasis(eig.vectors.matrix().leftCols(k));
  model.eigenvalues = eig.values.head(k);
  const Matrix diffs = pairwise_differences(ensemble.first_basis_matrix());
  for (Index i = 0; i < k; ++i) {
    model.power.push_back((diffs.transpose() * eig.vectors.column(i)).squaredNorm() / eig.values(i));
    model.selection.achieved_power += model.power.back();
  }
  return model;
}

/// GDS as a classifier-ready model; references are the projected φ₁ᶜ.
inline DiscriminantModel gds_model(const SubspaceEnsemble& ensemble, GdsRule rule = PowerThreshold{}) {
  GdsModel g = gds(ensemble, rule);
  DiscriminantModel model;
  model.method = Method::GDS;
  model.basis = std::move(g.basis);
  model.criterion_values = g.eigenvalues;
  model.labels = ensemble.labels();
  model.class_refs = model.basis.matrix().transpose() * ensemble.first_basis_matrix();
  return model;
}

struct GdsDecomposition {
  SymMatrix between_term;   // Σ_B3 / (2(C − 1))
  SymMatrix within;         // Σ_W5
};

/// Splits G into a first-basis difference term and a sum term:
/// G = Σ_B3 / (2(C − 1)) + Σ_W5 with
/// Σ_W5 = Σ_{j<k} z′z′ᵀ / (2(C − 1)) + Σ_c Σ_{i≥2} φᵢᶜφᵢᶜᵀ, z′ = φ₁ʲ + φ₁ᵏ.
inline GdsDecomposition gds_decomposition(const SubspaceEnsemble& ensemble) {
  const Index n = ensemble[0].dim();
  for (const auto& c : ensemble.classes()) {
    if (c.dim() != n) throw ValidationError("gds_decomposition: class subspaces must share one dimension");
  }
  const Index classes = ensemble.class_count();
  const double w = 1.0 / (2.0 * static_cast<double>(classes - 1));
  const Matrix first = ensemble.first_basis_matrix();
  Matrix sums(first.rows(), classes * (classes - 1) / 2);
  Index at = 0;
  for (Index j = 0; j < classes; ++j) {
    for (Index k = j + 1; k < classes; ++k) sums.col(at++) = first.col(j) + first.col(k);
  }
  SymMatrix within = w * SymMatrix::outer(sums);
  if (n > 1) {
    Matrix rest(first.rows(), classes * (n - 1));
    for (Index c = 0; c < classes; ++c) {
      rest.middleCols(c * (n - 1), n - 1) = ensemble[static_cast<std::size_t>(c)].basis.matrix().rightCols(n - 1);
    }
    within += SymMatrix::outer(rest);
  }
  return {w * first_basis_scatter(ensemble), std::move(within)};
}

}  // namespace gfda
