#include "oracles.hpp"

#include "orank/cp_als.hpp"
#include "orank/errors.hpp"
#include "orank/generators.hpp"

#include <gtest/gtest.h>

using namespace orank;

TEST(HosvdInit, LeadingSingularVectorsWithRandomPadding) {
  Rng rng(21);
  const DenseTensor a = random_tensor({6, 3, 5}, rng);
  const KruskalTensor k = hosvd_init(a, 4, 9);
  for (Index n = 0; n < a.order(); ++n) {
    const Matrix& f = k.factors[static_cast<std::size_t>(n)];
    ASSERT_EQ(f.cols(), 4);
    const Index lead = std::min<Index>(4, a.dim(n));
    const Eigen::JacobiSVD<Matrix> svd(unfold(a, n), Eigen::ComputeThinU);
    for (Index c = 0; c < lead; ++c) {
      EXPECT_NEAR(std::abs(f.col(c).dot(svd.matrixU().col(c))), 1.0, 1e-10);
    }
    for (Index c = 0; c < 4; ++c) EXPECT_NEAR(f.col(c).norm(), 1.0, 1e-12);
  }
}

TEST(AlsUpdate, SolvesModeLeastSquaresExactly) {
  Rng rng(22);
  const DenseTensor a = random_tensor({4, 5, 3}, rng);
  std::vector<Matrix> f;
  for (Index d : a.dims()) f.push_back(random_matrix(d, 3, rng));
  KruskalTensor k(f);
  als_update_mode(a, k, 1);
  // normal equations: the gradient of the fit in mode 1 vanishes
  const Matrix resid = k.factors[1] * gram_hadamard(k, 1) - mttkrp(a, k.factors, 1);
  EXPECT_LT(resid.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Als, RecoversExactLowRankTensor) {
  const DenseTensor a = make_lowrank({8, 7, 6}, 3, 4);
  AlsConfig cfg;
  cfg.rank = 3;
  cfg.rel_fn_tol = 1e-10;
  const AlsResult r = als_fit(a, cfg);
  EXPECT_LT(relative_error(a, r.model), 1e-6);
  EXPECT_EQ(r.trace.size(), static_cast<std::size_t>(r.sweeps));
}

TEST(Als, ErrorIsNonIncreasing) {
  Rng rng(23);
  const DenseTensor a = random_tensor({6, 5, 4}, rng);
  AlsConfig cfg;
  cfg.rank = 3;
  cfg.max_iters = 50;
  const AlsResult r = als_fit(a, cfg);
  for (std::size_t i = 1; i < r.trace.size(); ++i) {
    EXPECT_LE(r.trace.rows[i].rerr, r.trace.rows[i - 1].rerr + 1e-12);
  }
}

TEST(Als, ConfigAndShapeChecks) {
  Rng rng(24);
  const DenseTensor a = random_tensor({3, 3}, rng);
  AlsConfig cfg;
  cfg.rank = 0;
  EXPECT_THROW(als_fit(a, cfg), DomainError);
  cfg.rank = 2;
  EXPECT_THROW(als_fit(a, cfg, KruskalTensor({Matrix(3, 1), Matrix(3, 1)})), ShapeError);
}

TEST(SymmetricPinv, InvertsNonsingularAndDropsNullSpace) {
  Matrix g(2, 2);
  g << 2, 1, 1, 2;
  EXPECT_LT((symmetric_pinv(g) * g - Matrix::Identity(2, 2)).norm(), 1e-12);
  Matrix s = Matrix::Ones(2, 2);
  const Matrix p = symmetric_pinv(s);
  EXPECT_LT((s * p * s - s).norm(), 1e-12);
}
