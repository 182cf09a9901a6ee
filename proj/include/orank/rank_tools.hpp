#pragma once

#include "orank/kruskal.hpp"

#include <cstdint>

namespace orank {

/// Largest k such that every set of k columns of m is linearly independent.
/// A subset counts as independent when its smallest singular value exceeds
/// tol times its largest. Exhaustive over subsets, so meant for small R.
Index k_rank(const Matrix& m, double tol = 1e-10);

struct RankCertificate {
  std::vector<Index> krank_per_mode;
  bool uniqueness_holds = false;
  Index bound_lhs = 0;  // sum of k-ranks
  Index bound_rhs = 0;  // 2R + N - 1
};

/// Kruskal's sufficient condition for essential uniqueness of the CP factors.
RankCertificate uniqueness_certificate(const KruskalTensor& k, double tol = 1e-10);

/// Orthogonal decomposition of a built from the nonzero mode-m fibers of its
/// HOSVD core, mode m zero-based. Has at most prod_{n != m} rank_n(a) terms.
KruskalTensor fiber_orthogonal_decomposition(const DenseTensor& a, Index m, double eps = 1e-10);

/// Mode minimizing prod_{n != m} rank_n(a).
Index best_fiber_mode(const DenseTensor& a, double eps = 1e-10);

/// Random factors with full column rank R in every mode and a non-diagonal
/// Gram-Hadamard matrix, resampled up to 100 times. The tensor has rank R but
/// no orthogonal rank-R decomposition. Throws DomainError when R < 2 or
/// R > min(dims).
KruskalTensor make_nonorthogonal_unique(const std::vector<Index>& dims, Index rank, std::uint64_t seed);

/// Appends rows M to the mode-1 factor so that its Gram becomes t I with
/// t = 1.1 * lambda_max(V1' V1), where M' M = t I - V1' V1. The input tensor is
/// the leading I_1 slab of the result.
KruskalTensor subtensor_extension(const KruskalTensor& k);

}  // namespace orank
