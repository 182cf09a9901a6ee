#include "orank/cp_als.hpp"

#include "orank/alm.hpp"
#include "orank/errors.hpp"
#include "orank/random.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace orank {

namespace {

double safe_theta(const KruskalTensor& k) {
  try {
    return theta(k);
  } catch (const DegenerateComponentError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

void AlsConfig::validate() const {
  if (rank < 1) throw DomainError("ALS: rank must be at least 1");
  if (max_iters < 1) throw DomainError("ALS: max_iters must be at least 1");
  if (!(rel_fn_tol > 0.0)) throw DomainError("ALS: rel_fn_tol must be positive");
}

Matrix symmetric_pinv(const Matrix& g, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  const Vector& ev = eig.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  Vector inv = Vector::Zero(ev.size());
  if (top > 0.0) {
    for (Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev(i)) > cutoff * top) inv(i) = 1.0 / ev(i);
    }
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

KruskalTensor hosvd_init(const DenseTensor& a, Index rank, std::uint64_t seed) {
  if (rank < 1) throw DomainError("hosvd_init: rank must be at least 1");
  Rng rng(seed);
  std::vector<Matrix> factors;
  for (Index n = 0; n < a.order(); ++n) {
    const Matrix an = unfold(a, n);
    Matrix gram = Matrix::Zero(an.rows(), an.rows());
    gram.selfadjointView<Eigen::Lower>().rankUpdate(an);
    gram = gram.selfadjointView<Eigen::Lower>();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const Index in = a.dim(n);
    const Index lead = std::min(rank, in);
    Matrix f(in, rank);
    // eigenvalues ascend; take the trailing ones in descending order
    for (Index c = 0; c < lead; ++c) {
      Vector u = eig.eigenvectors().col(in - 1 - c);
      Index imax = 0;
      u.cwiseAbs().maxCoeff(&imax);
      if (u(imax) < 0) u = -u;
      f.col(c) = u;
    }
    for (Index c = lead; c < rank; ++c) {
      Vector u = random_matrix(in, 1, rng);
      f.col(c) = u / u.norm();
    }
    factors.push_back(std::move(f));
  }
  return KruskalTensor(std::move(factors));
}

Matrix als_update_mode(const DenseTensor& a, KruskalTensor& k, Index n) {
  Matrix w = mttkrp(a, k.factors, n);
  const Matrix gamma = gram_hadamard(k, n);
  k.factors[static_cast<std::size_t>(n)] = w * symmetric_pinv(gamma);
  return w;
}

AlsResult als_fit(const DenseTensor& a, const AlsConfig& cfg) {
  cfg.validate();
  if (cfg.init == AlsInit::TruncatedHosvd) return als_fit(a, cfg, hosvd_init(a, cfg.rank, cfg.seed));
  Rng rng(cfg.seed);
  std::vector<Matrix> factors;
  for (Index n = 0; n < a.order(); ++n) factors.push_back(random_matrix(a.dim(n), cfg.rank, rng));
  return als_fit(a, cfg, KruskalTensor(std::move(factors)));
}

AlsResult als_fit(const DenseTensor& a, const AlsConfig& cfg, KruskalTensor init) {
  cfg.validate();
  init = init.absorb_weights();
  if (init.dims() != a.dims() || init.rank() != cfg.rank) {
    throw ShapeError("ALS: initial guess does not match tensor shape or rank");
  }
  const auto start = std::chrono::steady_clock::now();
  const double norm_a = norm(a);
  if (norm_a == 0.0) throw DomainError("ALS: input tensor is zero");

  AlsResult res;
  res.model = std::move(init);
  auto& v = res.model.factors;
  const Index order = a.order();
  double rerr_prev = 1.0;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    Matrix w_last;
    for (Index n = 0; n < order; ++n) {
      Matrix w = als_update_mode(a, res.model, n);
      auto& vn = v[static_cast<std::size_t>(n)];
      if (n + 1 < order) {
        for (Index c = 0; c < vn.cols(); ++c) {
          const double cn = vn.col(c).norm();
          if (cn > 0.0) vn.col(c) /= cn;
        }
      } else {
        w_last = std::move(w);
      }
    }
    const auto& vl = v.back();
    const double ip = (w_last.array() * vl.array()).sum();
    const double model_sq = gram_hadamard(res.model).sum();
    const double rerr = std::sqrt(std::max(0.0, norm_a * norm_a - 2.0 * ip + model_sq)) / norm_a;

    TraceRow row;
    row.k = it;
    row.theta = safe_theta(res.model);
    row.rel_change = std::abs(rerr_prev - rerr);
    row.inner_iters = 1;
    row.rerr = rerr;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.trace.rows.push_back(row);
    res.sweeps = it;
    if (row.rel_change < cfg.rel_fn_tol) {
      res.converged = true;
      break;
    }
    rerr_prev = rerr;
  }
  return res;
}

}  // namespace orank
