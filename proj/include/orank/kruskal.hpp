#pragma once

#include "orank/tensor.hpp"

#include <optional>
#include <vector>

namespace orank {

/// Sum of R rank-one tensors: sum_r w_r * v_r^(1) o ... o v_r^(N).
///
/// factors[n] is I_n x R and holds the mode-n vectors as columns. Absent
/// weights mean all ones; solver-internal tensors keep the scale inside the
/// factors and only final projected results carry weights.
struct KruskalTensor {
  std::vector<Matrix> factors;
  std::optional<Vector> weights;

  KruskalTensor() = default;
  explicit KruskalTensor(std::vector<Matrix> f, std::optional<Vector> w = std::nullopt);

  Index order() const noexcept { return static_cast<Index>(factors.size()); }
  Index rank() const noexcept { return factors.empty() ? 0 : factors.front().cols(); }
  std::vector<Index> dims() const;
  double weight(Index r) const { return weights ? (*weights)(r) : 1.0; }

  /// Throws ShapeError when the invariants are broken.
  void validate() const;

  /// Drops the weights by scaling them into the mode-1 vectors.
  KruskalTensor absorb_weights() const;
};

DenseTensor reconstruct(const KruskalTensor& k);
/// Dense rank-one tensor of component r, weight included.
DenseTensor component(const KruskalTensor& k, Index r);

/// Hadamard product of the mode Grams V^(n)^T V^(n), skipping mode `omit` if set.
/// Weights are ignored.
Matrix gram_hadamard(const KruskalTensor& k, std::optional<Index> omit = std::nullopt);

/// <T_s, T_t> for all pairs, weights included.
Matrix pairwise_inner(const KruskalTensor& k);

struct OrthogonalityCheck {
  bool orthogonal;
  double max_offdiag;
};

/// Orthogonal when every |<T_s,T_t>|, s != t, is at most tol times the largest
/// diagonal entry (or tol itself when all diagonals vanish).
OrthogonalityCheck is_orthogonal(const KruskalTensor& k, double tol);

/// Equalizes the mode norms of every component to delta_r^(1/N) with
/// delta_r = prod_n ||v_r^(n)||. Components with delta_r == 0 become zero.
KruskalTensor rebalance(const KruskalTensor& k);

/// Per-component delta_r = prod_n ||v_r^(n)|| (weights ignored).
Vector component_norms(const KruskalTensor& k);

/// ||reconstruct(k)|| without forming the dense tensor.
double kruskal_norm(const KruskalTensor& k);

/// ||a - reconstruct(k)|| / ||a||; DomainError if a is zero.
double relative_error(const DenseTensor& a, const KruskalTensor& k);

}  // namespace orank
