#include "oracles.hpp"

#include "orank/cp_als.hpp"
#include "orank/errors.hpp"
#include "orank/generators.hpp"
#include "orank/orthogonalize.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace orank;

namespace {

double max_offdiag(const Matrix& m) {
  return (m - Matrix(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff();
}

double unit_deviation(const std::vector<Matrix>& fs) {
  double d = 0.0;
  for (const auto& f : fs) d = std::max(d, (f.colwise().norm().array() - 1.0).abs().maxCoeff());
  return d;
}

}  // namespace

TEST(Orthogonalize, RandomInputsBecomeOrthonormal) {
  Rng rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto ins = oracle::random_instance(rng, 2, true);
    const OrthonormalRankOneList out = orthogonalize(ins.k);
    EXPECT_LE(unit_deviation(out.factors), 1e-13);
    EXPECT_LE(max_offdiag(oracle::gram_hadamard(KruskalTensor(out.factors))), 1e-12);
  }
}

TEST(Orthogonalize, OrthonormalInputUnchanged) {
  Rng rng(42);
  const KruskalTensor k = oracle::random_orthogonal_kruskal({5, 4, 3}, 4, rng);
  const OrthonormalRankOneList out = orthogonalize(k);
  for (std::size_t n = 0; n < k.factors.size(); ++n) {
    EXPECT_LT((out.factors[n] - k.factors[n]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Orthogonalize, TwoDimensionalGramSchmidt) {
  const double phi = 0.3;
  Matrix m1(2, 2), m2(2, 2);
  m1 << 1, std::cos(phi), 0, std::sin(phi);
  m2 << 1, 1, 0, 0;
  const OrthonormalRankOneList out = orthogonalize(KruskalTensor({m1, m2}));
  EXPECT_NEAR(std::abs(out.factors[0](1, 1)), 1.0, 1e-15);
  EXPECT_NEAR(out.factors[0](0, 1), 0.0, 1e-15);
  EXPECT_EQ(out.factors[1], m2);
}

TEST(Orthogonalize, TiesGoToLowestMode) {
  Matrix m(2, 2);
  m << 1, 1, 0, 1;
  m.col(1).normalize();
  const OrthonormalRankOneList out = orthogonalize(KruskalTensor({m, m}));
  EXPECT_NEAR(out.factors[0](0, 1), 0.0, 1e-15);
  EXPECT_LT((out.factors[1] - m).norm(), 1e-15);
}

TEST(Orthogonalize, VectorInsideSpanIsReplaced) {
  // identical components: u_2 lies in span(u_1) in every mode
  Matrix m(3, 2);
  m << 1, 1, 0, 0, 0, 0;
  const OrthonormalRankOneList out = orthogonalize(KruskalTensor({m, m}));
  EXPECT_NEAR(out.factors[0](1, 1), 1.0, 1e-15);
  EXPECT_LE(max_offdiag(gram_hadamard(KruskalTensor(out.factors))), 1e-15);
}

TEST(Orthogonalize, NoRoomLeftIsAnError) {
  Matrix m(1, 2);
  m << 1, 1;
  EXPECT_THROW(orthogonalize(KruskalTensor({m, m})), DegenerateComponentError);
}

TEST(Orthogonalize, ZeroModeVectorIsAnError) {
  Matrix m = Matrix::Identity(3, 2);
  m.col(0).setZero();
  EXPECT_THROW(orthogonalize(KruskalTensor({m, Matrix::Identity(3, 2)})), DegenerateComponentError);
}

// Orthogonality already established is never broken by later steps.
TEST(OrthogonalizeProperty, PairsStayOrthogonalAfterEveryStep) {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ins = oracle::random_instance(rng, 3, true);
    orthogonalize(ins.k, [](Index ell, const std::vector<Matrix>& fs) {
      KruskalTensor done;
      for (const auto& f : fs) done.factors.push_back(f.leftCols(ell + 1));
      EXPECT_LE(max_offdiag(oracle::gram_hadamard(done)), 1e-12) << "after step " << ell;
    });
  }
}

TEST(Project, ResidualIsOrthogonalToBasis) {
  Rng rng(44);
  for (int trial = 0; trial < 10; ++trial) {
    const auto ins = oracle::random_instance(rng, 2, true);
    const OrthonormalRankOneList p = project(ins.a, orthogonalize(ins.k));
    const DenseTensor resid = ins.a - reconstruct(p.to_kruskal());
    const KruskalTensor basis(p.factors);
    for (Index r = 0; r < basis.rank(); ++r) {
      EXPECT_LE(std::abs(oracle::dot(resid, oracle::rank_one(basis, r))), 1e-10 * norm(ins.a));
    }
    const double rn = norm(resid);
    EXPECT_NEAR(norm(ins.a) * norm(ins.a), rn * rn + p.sigma->squaredNorm(), 1e-9 * norm(ins.a) * norm(ins.a));
    EXPECT_NEAR(projected_relative_error(ins.a, p), rn / norm(ins.a), 1e-7);
    // idempotent
    const OrthonormalRankOneList again = project(reconstruct(p.to_kruskal()), p);
    EXPECT_LT((*again.sigma - *p.sigma).cwiseAbs().maxCoeff(), 1e-12 * p.sigma->cwiseAbs().maxCoeff());
  }
}

TEST(Project, SpanMembersAndOrthogonalInputs) {
  Rng rng(45);
  const KruskalTensor k = oracle::random_orthogonal_kruskal({4, 3, 5}, 3, rng);
  const DenseTensor a = reconstruct(k);
  const OrthonormalRankOneList p = project(a, orthogonalize(k));
  EXPECT_LT(relative_error(a, p.to_kruskal()), 1e-12);

  // mode-1 vectors of the list avoid e_4, so anything along e_4 is orthogonal to the span
  KruskalTensor in_span = k;
  in_span.factors[0].row(3).setZero();
  KruskalTensor outside = k;
  outside.factors[0].setZero();
  outside.factors[0].row(3).setOnes();
  const OrthonormalRankOneList q = project(reconstruct(outside), orthogonalize(in_span));
  EXPECT_LT(q.sigma->cwiseAbs().maxCoeff(), 1e-15);
}

// Orthogonalizing a nearly orthogonal solver output moves each normalized
// vector by at most a small multiple of theta.
TEST(OrthogonalizeProperty, SmallThetaMeansSmallPerturbation) {
  const DenseTensor a = make_hilbert({10, 8, 6, 7});
  AlsConfig als;
  als.rank = 4;
  AlmConfig cfg;
  cfg.rank = 4;
  const AlmResult r = od_alm_fit(a, cfg, als_fit(a, als).model);
  const double th = r.trace.back().theta;
  ASSERT_LT(th, 1e-4);
  const OrthonormalRankOneList out = orthogonalize(r.factors);
  for (std::size_t n = 0; n < out.factors.size(); ++n) {
    for (Index c = 0; c < 4; ++c) {
      const Vector before = r.factors.factors[n].col(c).normalized();
      EXPECT_LE((out.factors[n].col(c) - before).norm(), 10.0 * 4 * th);
    }
  }
}
