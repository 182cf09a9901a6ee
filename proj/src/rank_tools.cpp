#include "orank/rank_tools.hpp"

#include "orank/errors.hpp"
#include "orank/random.hpp"

#include <algorithm>
#include <numeric>

namespace orank {

namespace {

bool independent(const Matrix& m, const std::vector<Index>& cols, double tol) {
  Matrix sub(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Index>(j)) = m.col(cols[j]);
  if (sub.cols() > sub.rows()) return false;
  const Vector s = Eigen::JacobiSVD<Matrix>(sub).singularValues();
  return s(0) > 0.0 && s(s.size() - 1) > tol * s(0);
}

// Visits all size-j subsets of 0..n-1 in lexicographic order until pred fails.
template <class Pred>
bool all_subsets(Index n, Index j, Pred pred) {
  std::vector<Index> idx(static_cast<std::size_t>(j));
  std::iota(idx.begin(), idx.end(), Index{0});
  while (true) {
    if (!pred(idx)) return false;
    Index i = j - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - j + i) --i;
    if (i < 0) return true;
    ++idx[static_cast<std::size_t>(i)];
    for (Index q = i + 1; q < j; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
  }
}

Index product_except(const std::vector<Index>& v, Index m) {
  Index p = 1;
  for (std::size_t n = 0; n < v.size(); ++n) {
    if (static_cast<Index>(n) != m) p *= v[n];
  }
  return p;
}

}  // namespace

Index k_rank(const Matrix& m, double tol) {
  if (tol < 0.0) throw DomainError("k_rank: tol must be non-negative");
  const Index cols = m.cols();
  if (cols == 0) return 0;
  const Vector norms = m.colwise().norm().transpose();
  if (norms.minCoeff() <= tol * norms.maxCoeff()) return 0;
  Index k = 0;
  for (Index j = 1; j <= std::min(cols, m.rows()); ++j) {
    const bool ok = all_subsets(cols, j, [&](const std::vector<Index>& s) { return independent(m, s, tol); });
    if (!ok) break;
    k = j;
  }
  return k;
}

RankCertificate uniqueness_certificate(const KruskalTensor& k, double tol) {
  k.validate();
  if (k.rank() < 1) throw DomainError("uniqueness_certificate: rank must be at least 1");
  RankCertificate c;
  for (const auto& f : k.factors) {
    c.krank_per_mode.push_back(k_rank(f, tol));
    c.bound_lhs += c.krank_per_mode.back();
  }
  c.bound_rhs = 2 * k.rank() + k.order() - 1;
  c.uniqueness_holds = c.bound_lhs >= c.bound_rhs;
  return c;
}

KruskalTensor fiber_orthogonal_decomposition(const DenseTensor& a, Index m, double eps) {
  const Index order = a.order();
  if (m < 0 || m >= order) throw DomainError("fiber_orthogonal_decomposition: mode out of range");
  const Hosvd h = hosvd(a, eps);
  const auto& core = h.core;
  const auto um = static_cast<std::size_t>(m);

  std::vector<Index> outer_dims;
  for (Index n = 0; n < order; ++n) {
    if (n != m) outer_dims.push_back(std::max<Index>(h.nranks[static_cast<std::size_t>(n)], 1));
  }

  std::vector<std::vector<Vector>> cols(static_cast<std::size_t>(order));
  if (num_entries(outer_dims) > 0 && h.nranks[um] > 0) {
    std::vector<Index> outer(outer_dims.size(), 0);
    std::vector<Index> full(static_cast<std::size_t>(order), 0);
    do {
      for (Index n = 0, q = 0; n < order; ++n) {
        if (n != m) full[static_cast<std::size_t>(n)] = outer[static_cast<std::size_t>(q++)];
      }
      Vector fiber(a.dim(m));
      for (Index i = 0; i < a.dim(m); ++i) {
        full[um] = i;
        fiber(i) = core(full);
      }
      if (fiber.squaredNorm() == 0.0) continue;
      for (Index n = 0; n < order; ++n) {
        const auto un = static_cast<std::size_t>(n);
        if (n == m) {
          cols[un].push_back(h.us[un] * fiber);
        } else {
          cols[un].push_back(h.us[un].col(full[un]));
        }
      }
    } while (next_index(outer, outer_dims));
  }

  const Index r = static_cast<Index>(cols.front().size());
  if (r == 0) throw DomainError("fiber_orthogonal_decomposition: input tensor is zero");
  std::vector<Matrix> factors;
  for (Index n = 0; n < order; ++n) {
    Matrix f(a.dim(n), r);
    for (Index c = 0; c < r; ++c) f.col(c) = cols[static_cast<std::size_t>(n)][static_cast<std::size_t>(c)];
    factors.push_back(std::move(f));
  }
  return KruskalTensor(std::move(factors));
}

Index best_fiber_mode(const DenseTensor& a, double eps) {
  const Hosvd h = hosvd(a, eps);
  Index best = 0;
  for (Index m = 1; m < a.order(); ++m) {
    if (product_except(h.nranks, m) < product_except(h.nranks, best)) best = m;
  }
  return best;
}

KruskalTensor make_nonorthogonal_unique(const std::vector<Index>& dims, Index rank, std::uint64_t seed) {
  if (rank < 2) throw DomainError("make_nonorthogonal_unique: rank must be at least 2");
  if (dims.empty() || rank > *std::min_element(dims.begin(), dims.end())) {
    throw DomainError("make_nonorthogonal_unique: rank exceeds the smallest dimension");
  }
  Rng rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<Matrix> factors;
    bool full_rank = true;
    for (Index d : dims) {
      factors.push_back(random_matrix(d, rank, rng));
      Eigen::ColPivHouseholderQR<Matrix> qr(factors.back());
      qr.setThreshold(1e-10);
      full_rank = full_rank && qr.rank() == rank;
    }
    KruskalTensor k(std::move(factors));
    if (full_rank && !is_orthogonal(k, 1e-10).orthogonal) return k;
  }
  throw NumericalError("make_nonorthogonal_unique: no admissible sample in 100 attempts");
}

KruskalTensor subtensor_extension(const KruskalTensor& k) {
  k.validate();
  const KruskalTensor base = k.absorb_weights();
  const Matrix& v1 = base.factors.front();
  const Index r = base.rank();
  const Matrix g = v1.transpose() * v1;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  const double t = 1.1 * eig.eigenvalues().maxCoeff();
  const Vector rest = (t - eig.eigenvalues().array()).matrix();
  if ((rest.array() < 0.0).any() || !(t > 0.0)) {
    throw NumericalError("subtensor_extension: residual Gram is not positive semidefinite");
  }
  const Matrix mrows = rest.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();

  KruskalTensor out = base;
  Matrix stacked(v1.rows() + r, r);
  stacked << v1, mrows;
  out.factors.front() = std::move(stacked);
  return out;
}

}  // namespace orank
