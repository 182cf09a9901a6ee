#pragma once

#include "orank/kruskal.hpp"

#include <cstdint>
#include <string_view>

namespace orank {

enum class TensorKind { Random, LowRank, Hilbert, OrthNoise };

/// Parses "random", "lowrank", "hilbert" or "orth-noise"; InputError otherwise.
TensorKind parse_tensor_kind(std::string_view s);
std::string_view to_string(TensorKind k);

/// i.i.d. standard normal entries.
DenseTensor make_random(const std::vector<Index>& dims, std::uint64_t seed);

/// Reconstruction of a Kruskal tensor with i.i.d. standard normal factors.
DenseTensor make_lowrank(const std::vector<Index>& dims, Index rank, std::uint64_t seed);

/// a(i_1, ..., i_N) = 1 / (i_1 + ... + i_N - N + 1) with one-based indices.
DenseTensor make_hilbert(const std::vector<Index>& dims);

/// B1 + rho * B2: B1 is an orthonormal rank-R list (orthogonalized Gaussian
/// factors) with weights uniform in [1, 2], B2 has i.i.d. normal entries and
/// rho = noise_level * ||B1|| / ||B2||.
DenseTensor make_orth_noise(const std::vector<Index>& dims, Index rank, double noise_level,
                            std::uint64_t seed);

/// Dispatches on kind; rank and noise_level are ignored where they do not apply.
DenseTensor generate(TensorKind kind, const std::vector<Index>& dims, Index rank, double noise_level,
                     std::uint64_t seed);

}  // namespace orank
