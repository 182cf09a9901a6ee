#pragma once

#include "orank/tensor.hpp"

#include <cstdint>
#include <random>

namespace orank {

/// Seeded source of the library's randomness. The engine is std::mt19937_64,
/// whose output sequence is fixed by the C++ standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// i.i.d. standard normal entries.
Matrix random_matrix(Index rows, Index cols, Rng& rng);
DenseTensor random_tensor(std::vector<Index> dims, Rng& rng);
/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(Index n, Rng& rng);

}  // namespace orank
