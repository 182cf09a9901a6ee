#pragma once

#include "orank/kruskal.hpp"

#include <functional>
#include <optional>

namespace orank {

/// Rank-one tensors with unit mode vectors that are pairwise orthogonal as
/// tensors, plus optional coefficients sigma_r.
struct OrthonormalRankOneList {
  std::vector<Matrix> factors;
  std::optional<Vector> sigma;

  Index rank() const noexcept { return factors.empty() ? 0 : factors.front().cols(); }
  std::vector<Index> dims() const;
  /// Kruskal tensor with sigma (or ones) as weights.
  KruskalTensor to_kruskal() const;
};

/// Called after component `ell` (zero-based) has been orthogonalized against
/// components 0..ell-1.
using OrthogonalizeStep = std::function<void(Index ell, const std::vector<Matrix>& factors)>;

/// Makes the rank-one terms of k pairwise orthogonal with minimal change.
///
/// All mode vectors are normalized first. For each component l >= 1 and each
/// earlier component r, the mode with the smallest |<u_l, u_r>| is chosen
/// (lowest mode on ties); in every mode u_l is then projected off the span of
/// the earlier vectors assigned to that mode and renormalized. If u_l falls
/// into that span it is replaced by the first standard basis vector with a
/// nonzero remainder. Throws DegenerateComponentError on a zero mode vector
/// or when no orthogonal direction is left.
OrthonormalRankOneList orthogonalize(const KruskalTensor& k, const OrthogonalizeStep& on_step = {});

/// Sets sigma_r = <a, u_r^(1) o ... o u_r^(N)>, the coefficients of the
/// orthogonal projection of a onto the span of the list.
OrthonormalRankOneList project(const DenseTensor& a, OrthonormalRankOneList list);

/// sqrt(||a||^2 - sum sigma_r^2) / ||a|| for a projected list.
double projected_relative_error(const DenseTensor& a, const OrthonormalRankOneList& list);

}  // namespace orank
