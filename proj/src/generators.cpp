#include "orank/generators.hpp"

#include "orank/errors.hpp"
#include "orank/orthogonalize.hpp"
#include "orank/random.hpp"

#include <string>

namespace orank {

namespace {

void check_dims(const std::vector<Index>& dims) {
  if (dims.empty()) throw InputError("generator: at least one dimension is required");
  for (Index d : dims) {
    if (d < 1) throw InputError("generator: dimensions must be positive");
  }
}

void check_rank(Index rank) {
  if (rank < 1) throw InputError("generator: rank must be at least 1");
}

}  // namespace

TensorKind parse_tensor_kind(std::string_view s) {
  if (s == "random") return TensorKind::Random;
  if (s == "lowrank") return TensorKind::LowRank;
  if (s == "hilbert") return TensorKind::Hilbert;
  if (s == "orth-noise") return TensorKind::OrthNoise;
  throw InputError("unknown tensor kind '" + std::string(s) + "'");
}

std::string_view to_string(TensorKind k) {
  switch (k) {
    case TensorKind::Random: return "random";
    case TensorKind::LowRank: return "lowrank";
    case TensorKind::Hilbert: return "hilbert";
    case TensorKind::OrthNoise: return "orth-noise";
  }
  return "?";
}

DenseTensor make_random(const std::vector<Index>& dims, std::uint64_t seed) {
  check_dims(dims);
  Rng rng(seed);
  return random_tensor(dims, rng);
}

DenseTensor make_lowrank(const std::vector<Index>& dims, Index rank, std::uint64_t seed) {
  check_dims(dims);
  check_rank(rank);
  Rng rng(seed);
  std::vector<Matrix> factors;
  for (Index d : dims) factors.push_back(random_matrix(d, rank, rng));
  return reconstruct(KruskalTensor(std::move(factors)));
}

DenseTensor make_hilbert(const std::vector<Index>& dims) {
  check_dims(dims);
  DenseTensor a(dims);
  std::vector<Index> idx(dims.size(), 0);
  auto vals = a.values();
  std::size_t off = 0;
  do {
    Index s = 0;
    for (Index i : idx) s += i;
    // zero-based indices: sum(i + 1) - N + 1 = sum(i) + 1
    vals[off++] = 1.0 / static_cast<double>(s + 1);
  } while (next_index(idx, dims));
  return a;
}

DenseTensor make_orth_noise(const std::vector<Index>& dims, Index rank, double noise_level,
                            std::uint64_t seed) {
  check_dims(dims);
  check_rank(rank);
  if (!(noise_level >= 0.0)) throw InputError("generator: noise level must be non-negative");
  Rng rng(seed);
  std::vector<Matrix> factors;
  for (Index d : dims) factors.push_back(random_matrix(d, rank, rng));
  OrthonormalRankOneList list = orthogonalize(KruskalTensor(std::move(factors)));
  Vector w(rank);
  for (Index r = 0; r < rank; ++r) w(r) = rng.uniform(1.0, 2.0);
  list.sigma = w;
  DenseTensor b1 = reconstruct(list.to_kruskal());
  if (noise_level == 0.0) return b1;
  const DenseTensor b2 = random_tensor(dims, rng);
  const double rho = noise_level * norm(b1) / norm(b2);
  return b1 + rho * b2;
}

DenseTensor generate(TensorKind kind, const std::vector<Index>& dims, Index rank, double noise_level,
                     std::uint64_t seed) {
  switch (kind) {
    case TensorKind::Random: return make_random(dims, seed);
    case TensorKind::LowRank: return make_lowrank(dims, rank, seed);
    case TensorKind::Hilbert: return make_hilbert(dims);
    case TensorKind::OrthNoise: return make_orth_noise(dims, rank, noise_level, seed);
  }
  throw InputError("unknown tensor kind");
}

}  // namespace orank
