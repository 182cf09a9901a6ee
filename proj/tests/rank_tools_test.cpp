#include "oracles.hpp"

#include "orank/errors.hpp"
#include "orank/generators.hpp"
#include "orank/rank_tools.hpp"

#include <gtest/gtest.h>

using namespace orank;

namespace {

// k-rank by brute force over bitmasks, rank from a QR with absolute threshold.
Index brute_k_rank(const Matrix& m) {
  const Index r = m.cols();
  Index best = r;
  for (unsigned mask = 1; mask < (1u << r); ++mask) {
    Matrix sub(m.rows(), 0);
    for (Index c = 0; c < r; ++c) {
      if (mask & (1u << c)) {
        sub.conservativeResize(Eigen::NoChange, sub.cols() + 1);
        sub.col(sub.cols() - 1) = m.col(c);
      }
    }
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-9);
    if (lu.rank() < sub.cols()) best = std::min(best, sub.cols() - 1);
  }
  return best;
}

}  // namespace

TEST(KRank, SimpleMatrices) {
  EXPECT_EQ(k_rank(Matrix::Identity(4, 4)), 4);
  Matrix rep(3, 3);
  rep << 1, 1, 0, 0, 0, 1, 2, 2, 0;
  EXPECT_EQ(k_rank(rep), 1);
  Matrix z = Matrix::Identity(3, 3);
  z.col(2).setZero();
  EXPECT_EQ(k_rank(z), 0);
}

TEST(KRank, MatchesBruteForce) {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m = random_matrix(3 + trial % 4, 4, rng);
    if (trial % 3 == 0) m.col(3) = m.col(0) + m.col(1);
    if (trial % 5 == 0) m.col(2) = 2.0 * m.col(1);
    const Index k = k_rank(m);
    EXPECT_EQ(k, brute_k_rank(m));
    Eigen::FullPivLU<Matrix> lu(m);
    EXPECT_LE(k, lu.rank());
  }
}

TEST(Uniqueness, Certificates) {
  Rng rng(52);
  KruskalTensor k({random_matrix(4, 3, rng), random_matrix(4, 3, rng), random_matrix(4, 3, rng)});
  const RankCertificate c = uniqueness_certificate(k);
  EXPECT_EQ(c.bound_lhs, 9);
  EXPECT_EQ(c.bound_rhs, 8);
  EXPECT_TRUE(c.uniqueness_holds);

  Matrix dup = random_matrix(4, 2, rng);
  dup.col(1) = dup.col(0);
  const RankCertificate d = uniqueness_certificate(KruskalTensor({dup, dup, dup}));
  EXPECT_EQ(d.krank_per_mode, (std::vector<Index>{1, 1, 1}));
  EXPECT_FALSE(d.uniqueness_holds);
}

TEST(FiberDecomposition, RankOneAndSuperdiagonal) {
  Rng rng(53);
  KruskalTensor one({random_matrix(3, 1, rng), random_matrix(4, 1, rng), random_matrix(2, 1, rng)});
  const DenseTensor a = reconstruct(one);
  EXPECT_EQ(fiber_orthogonal_decomposition(a, 0).rank(), 1);

  DenseTensor s({2, 2, 2});
  s({0, 0, 0}) = 1.0;
  s({1, 1, 1}) = 2.0;
  const KruskalTensor f = fiber_orthogonal_decomposition(s, 2);
  EXPECT_LE(f.rank(), 4);
  EXPECT_TRUE(is_orthogonal(f, 1e-10).orthogonal);
  EXPECT_LT(relative_error(s, f), 1e-12);
}

TEST(FiberDecomposition, RandomTensorsEveryMode) {
  Rng rng(54);
  for (int trial = 0; trial < 5; ++trial) {
    const DenseTensor a = random_tensor({3, 2 + trial % 3, 4}, rng);
    const Hosvd h = hosvd(a);
    for (Index m = 0; m < a.order(); ++m) {
      const KruskalTensor f = fiber_orthogonal_decomposition(a, m);
      Index bound = 1;
      for (Index n = 0; n < a.order(); ++n) {
        if (n != m) bound *= h.nranks[static_cast<std::size_t>(n)];
      }
      EXPECT_LE(f.rank(), bound);
      EXPECT_TRUE(is_orthogonal(f, 1e-10).orthogonal);
      EXPECT_LT(relative_error(a, f), 1e-9);
    }
  }
}

TEST(FiberDecomposition, HilbertBestMode) {
  const DenseTensor a = make_hilbert({20, 16, 10, 32});
  const Hosvd h = hosvd(a);
  const Index m = best_fiber_mode(a);
  const KruskalTensor f = fiber_orthogonal_decomposition(a, m);
  Index best = std::numeric_limits<Index>::max();
  for (Index q = 0; q < a.order(); ++q) {
    Index p = 1;
    for (Index n = 0; n < a.order(); ++n) {
      if (n != q) p *= h.nranks[static_cast<std::size_t>(n)];
    }
    best = std::min(best, p);
  }
  EXPECT_LE(f.rank(), best);
  EXPECT_TRUE(is_orthogonal(f, 1e-10).orthogonal);
  EXPECT_LT(relative_error(a, f), 1e-9);
}

TEST(NonorthogonalUnique, CertifiedAndInfeasibleCases) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const KruskalTensor k = make_nonorthogonal_unique({3, 3, 3}, 2, seed);
    EXPECT_FALSE(is_orthogonal(k, 1e-10).orthogonal);
    const RankCertificate c = uniqueness_certificate(k);
    EXPECT_EQ(c.krank_per_mode, (std::vector<Index>{2, 2, 2}));
    EXPECT_TRUE(c.uniqueness_holds);
  }
  EXPECT_THROW(make_nonorthogonal_unique({2, 2}, 3, 0), DomainError);
  EXPECT_THROW(make_nonorthogonal_unique({4, 4}, 1, 0), DomainError);
}

TEST(SubtensorExtension, GramAndLeadingSlab) {
  const KruskalTensor k = make_nonorthogonal_unique({4, 3, 5}, 3, 7);
  const KruskalTensor e = subtensor_extension(k);
  const Matrix& v1 = e.factors.front();
  const Matrix g = v1.transpose() * v1;
  const double t = g(0, 0);
  EXPECT_LT((g - t * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10 * t);

  const DenseTensor big = reconstruct(e);
  const DenseTensor small = reconstruct(k);
  double dev = 0.0;
  std::vector<Index> idx(3, 0);
  do {
    dev = std::max(dev, std::abs(big(idx) - small(idx)));
  } while (next_index(idx, small.dims()));
  EXPECT_LT(dev, 1e-12 * norm(small));
}

TEST(SubtensorExtension, OrthonormalColumnsAndOrthogonalLaterModes) {
  Rng rng(55);
  const Matrix q = random_orthogonal(5, rng).leftCols(3);
  const KruskalTensor k({q, random_matrix(4, 3, rng)});
  const KruskalTensor e = subtensor_extension(k);
  const Matrix m = e.factors.front().bottomRows(3);
  const Matrix mm = m.transpose() * m;
  const double t = 1.1;
  EXPECT_LT((mm - (t - 1.0) * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);

  // later modes with orthonormal columns: the extension is an orthogonal decomposition
  KruskalTensor later = make_nonorthogonal_unique({3, 4, 4}, 3, 8);
  for (std::size_t n = 1; n < later.factors.size(); ++n) {
    later.factors[n] = Eigen::HouseholderQR<Matrix>(later.factors[n]).householderQ() * Matrix::Identity(4, 3);
  }
  EXPECT_TRUE(is_orthogonal(subtensor_extension(later), 1e-10).orthogonal);
}
