#pragma once

// Independent reference implementations built from plain loops over entries.
// They share no code with the library beyond DenseTensor storage.

#include "orank/alm.hpp"
#include "orank/random.hpp"

#include <cmath>
#include <vector>

namespace oracle {

using orank::DenseTensor;
using orank::Index;
using orank::KruskalTensor;
using orank::Matrix;
using orank::Vector;

inline DenseTensor reconstruct(const KruskalTensor& k) {
  DenseTensor a(k.dims());
  std::vector<Index> idx(k.dims().size(), 0);
  const auto dims = k.dims();
  do {
    double s = 0.0;
    for (Index r = 0; r < k.rank(); ++r) {
      double p = k.weight(r);
      for (std::size_t n = 0; n < dims.size(); ++n) p *= k.factors[n](idx[n], r);
      s += p;
    }
    a(idx) = s;
  } while (orank::next_index(idx, dims));
  return a;
}

inline DenseTensor rank_one(const KruskalTensor& k, Index r) {
  KruskalTensor one;
  for (const auto& f : k.factors) one.factors.push_back(f.col(r));
  one.weights = Vector::Constant(1, k.weight(r));
  return oracle::reconstruct(one);
}

inline double dot(const DenseTensor& a, const DenseTensor& b) {
  double s = 0.0;
  for (Index i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

inline double col_dot(const Matrix& f, Index s, Index t) {
  double v = 0.0;
  for (Index i = 0; i < f.rows(); ++i) v += f(i, s) * f(i, t);
  return v;
}

inline Matrix gram_hadamard(const KruskalTensor& k) {
  const Index r = k.rank();
  Matrix h(r, r);
  for (Index s = 0; s < r; ++s) {
    for (Index t = 0; t < r; ++t) {
      double p = 1.0;
      for (const auto& f : k.factors) p *= col_dot(f, s, t);
      h(s, t) = p;
    }
  }
  return h;
}

inline Matrix pairwise_inner(const KruskalTensor& k) {
  const Index r = k.rank();
  std::vector<DenseTensor> terms;
  for (Index q = 0; q < r; ++q) terms.push_back(rank_one(k, q));
  Matrix m(r, r);
  for (Index s = 0; s < r; ++s) {
    for (Index t = 0; t < r; ++t) m(s, t) = dot(terms[s], terms[t]);
  }
  return m;
}

inline double objective(const DenseTensor& a, const KruskalTensor& k, const Matrix& lambda,
                        const Matrix& penalty) {
  const DenseTensor b = oracle::reconstruct(k);
  double fit = 0.0;
  for (Index i = 0; i < a.size(); ++i) fit += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
  double value = 0.5 * fit;
  const Index r = k.rank();
  for (Index s = 0; s < r; ++s) {
    for (Index t = 0; t < r; ++t) {
      if (s == t) continue;
      double h = 1.0;
      for (const auto& f : k.factors) h *= col_dot(f, s, t);
      value += 0.5 * lambda(s, t) * h + 0.25 * penalty(s, t) * h * h;
    }
  }
  return value;
}

inline Matrix penalty_matrix(const KruskalTensor& k, double mu) {
  const Index r = k.rank();
  std::vector<double> delta(r, 1.0);
  for (Index q = 0; q < r; ++q) {
    for (const auto& f : k.factors) delta[q] *= std::sqrt(col_dot(f, q, q));
  }
  Matrix c = Matrix::Zero(r, r);
  for (Index s = 0; s < r; ++s) {
    for (Index t = 0; t < r; ++t) {
      if (s != t) c(s, t) = mu / (delta[s] * delta[s] * delta[t] * delta[t]);
    }
  }
  return c;
}

inline Matrix update_multipliers(const KruskalTensor& k, const Matrix& lambda, const Matrix& penalty) {
  Matrix out = lambda;
  for (Index s = 0; s < k.rank(); ++s) {
    for (Index t = 0; t < k.rank(); ++t) {
      if (s == t) continue;
      double h = 1.0;
      for (const auto& f : k.factors) h *= col_dot(f, s, t);
      out(s, t) += penalty(s, t) * h;
    }
  }
  return out;
}

inline double theta(const KruskalTensor& k) {
  double worst = 0.0;
  for (Index s = 0; s < k.rank(); ++s) {
    for (Index t = 0; t < k.rank(); ++t) {
      if (s == t) continue;
      double best = 1e300;
      for (const auto& f : k.factors) {
        const double c = std::abs(col_dot(f, s, t)) / std::sqrt(col_dot(f, s, s) * col_dot(f, t, t));
        best = std::min(best, c);
      }
      worst = std::max(worst, best);
    }
  }
  return worst;
}

/// Central differences of the objective in every flattened coordinate with
/// step h = 1e-6 (1 + |x_i|).
inline Vector fd_gradient(const DenseTensor& a, const KruskalTensor& k, const Matrix& lambda,
                          const Matrix& penalty) {
  Vector x = orank::flatten(k);
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x(i)));
    const double xi = x(i);
    x(i) = xi + h;
    const double fp = objective(a, orank::unflatten(x, a.dims(), k.rank()), lambda, penalty);
    x(i) = xi - h;
    const double fm = objective(a, orank::unflatten(x, a.dims(), k.rank()), lambda, penalty);
    x(i) = xi;
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Max over entries of |a - b| / max(1, |b|).
inline double max_rel_dev(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a(i) - b(i)) / std::max(1.0, std::abs(b(i))));
  return m;
}

inline double rel_diff(const Matrix& a, const Matrix& b) {
  const double scale = std::max(1e-300, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

/// Random symmetric matrix with zero diagonal; nonnegative if requested.
inline Matrix random_sym_zero_diag(Index r, orank::Rng& rng, bool nonneg) {
  Matrix m(r, r);
  for (Index s = 0; s < r; ++s) {
    m(s, s) = 0.0;
    for (Index t = s + 1; t < r; ++t) {
      const double v = nonneg ? rng.uniform(0.0, 2.0) : rng.normal();
      m(s, t) = v;
      m(t, s) = v;
    }
  }
  return m;
}

/// Small random problem: N in {3,4}, I_n in [2,6], R in [min_rank,4].
struct Instance {
  DenseTensor a;
  KruskalTensor k;
  Matrix lambda;
  Matrix penalty;
};

/// With room set, every I_n >= R so that R orthogonal vectors fit in any mode.
inline Instance random_instance(orank::Rng& rng, Index min_rank = 1, bool room = false) {
  Instance ins;
  const int order = rng.uniform(0.0, 1.0) < 0.5 ? 3 : 4;
  const Index rank = min_rank + static_cast<Index>(rng.uniform(0.0, static_cast<double>(5 - min_rank)));
  const Index lo = room ? std::max<Index>(2, rank) : 2;
  std::vector<Index> dims;
  for (int n = 0; n < order; ++n) dims.push_back(lo + static_cast<Index>(rng.uniform(0.0, static_cast<double>(7 - lo))));
  ins.a = orank::random_tensor(dims, rng);
  std::vector<Matrix> f;
  for (Index d : dims) f.push_back(orank::random_matrix(d, rank, rng));
  ins.k = KruskalTensor(std::move(f));
  ins.lambda = random_sym_zero_diag(rank, rng, false);
  ins.penalty = random_sym_zero_diag(rank, rng, true);
  return ins;
}

/// Random orthonormal Kruskal tensor: each component orthogonal to all
/// earlier ones in one randomly chosen mode.
inline KruskalTensor random_orthogonal_kruskal(const std::vector<Index>& dims, Index rank, orank::Rng& rng) {
  std::vector<Matrix> f;
  for (Index d : dims) {
    f.push_back(orank::random_orthogonal(d, rng).leftCols(std::min(d, rank)));
  }
  // Mode 0 must hold rank orthonormal columns; the others can be arbitrary.
  for (std::size_t n = 1; n < f.size(); ++n) {
    Matrix g = orank::random_matrix(dims[n], rank, rng);
    for (Index c = 0; c < rank; ++c) g.col(c).normalize();
    f[n] = g;
  }
  Vector w(rank);
  for (Index r = 0; r < rank; ++r) w(r) = rng.uniform(0.5, 2.0);
  return KruskalTensor(std::move(f), w);
}

}  // namespace oracle
