#pragma once

#include "orank/kruskal.hpp"
#include "orank/trace.hpp"

#include <cstdint>

namespace orank {

enum class AlsInit { TruncatedHosvd, Random };

struct AlsConfig {
  Index rank = 1;
  int max_iters = 500;
  /// Stop when |RErr_prev - RErr| falls below this (change in fit).
  double rel_fn_tol = 1e-6;
  AlsInit init = AlsInit::TruncatedHosvd;
  std::uint64_t seed = 0;  // random init, and padding columns when rank > I_n

  void validate() const;
};

struct AlsResult {
  KruskalTensor model;  // unweighted; column norms live in the last mode
  RunTrace trace;       // one row per sweep
  int sweeps = 0;
  bool converged = false;
};

/// Leading min(R, I_n) left singular vectors of each unfolding. When R > I_n
/// the remaining columns are random unit vectors drawn from `seed`.
KruskalTensor hosvd_init(const DenseTensor& a, Index rank, std::uint64_t seed = 0);

/// CP alternating least squares. Each mode update solves
/// V^(n) Gamma^(n) = mttkrp(a, V, n) with a truncated pseudoinverse.
AlsResult als_fit(const DenseTensor& a, const AlsConfig& cfg);
AlsResult als_fit(const DenseTensor& a, const AlsConfig& cfg, KruskalTensor init);

/// One exact least-squares update of mode n in place; returns mttkrp(a, k, n)
/// computed before the update.
Matrix als_update_mode(const DenseTensor& a, KruskalTensor& k, Index n);

/// Pseudoinverse of a symmetric matrix; eigenvalues below cutoff * lambda_max are dropped.
Matrix symmetric_pinv(const Matrix& g, double cutoff = 1e-12);

}  // namespace orank
