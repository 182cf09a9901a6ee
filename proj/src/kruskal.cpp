#include "orank/kruskal.hpp"

#include "orank/errors.hpp"

#include <cmath>
#include <string>

namespace orank {

KruskalTensor::KruskalTensor(std::vector<Matrix> f, std::optional<Vector> w)
    : factors(std::move(f)), weights(std::move(w)) {
  validate();
}

std::vector<Index> KruskalTensor::dims() const {
  std::vector<Index> d;
  d.reserve(factors.size());
  for (const auto& f : factors) d.push_back(f.rows());
  return d;
}

void KruskalTensor::validate() const {
  if (factors.empty()) throw ShapeError("Kruskal tensor needs at least one factor matrix");
  const Index r = factors.front().cols();
  if (r < 1) throw ShapeError("Kruskal tensor rank must be at least 1");
  for (const auto& f : factors) {
    if (f.cols() != r) throw ShapeError("factor matrices must share the column count");
    if (f.rows() < 1) throw ShapeError("factor matrices must have at least one row");
  }
  if (weights && weights->size() != r) {
    throw ShapeError("weights length " + std::to_string(weights->size()) + " != rank " +
                     std::to_string(r));
  }
}

KruskalTensor KruskalTensor::absorb_weights() const {
  KruskalTensor out = *this;
  if (out.weights) {
    out.factors.front() = out.factors.front() * out.weights->asDiagonal();
    out.weights.reset();
  }
  return out;
}

DenseTensor reconstruct(const KruskalTensor& k) {
  k.validate();
  DenseTensor out(k.dims());
  // mode-1 unfolding of the result is V^(1) diag(w) (V^(N) (.) ... (.) V^(2))^T
  Matrix first = k.factors.front();
  if (k.weights) first = first * k.weights->asDiagonal();
  Eigen::Map<Matrix> a1(out.data(), first.rows(), out.size() / first.rows());
  if (k.order() == 1) {
    a1 = first.rowwise().sum();
    return out;
  }
  std::vector<Matrix> rest;
  for (Index n = k.order() - 1; n >= 1; --n) rest.push_back(k.factors[static_cast<std::size_t>(n)]);
  a1.noalias() = first * khatri_rao(rest).transpose();
  return out;
}

DenseTensor component(const KruskalTensor& k, Index r) {
  std::vector<Matrix> cols;
  for (const auto& f : k.factors) cols.emplace_back(f.col(r));
  Vector w(1);
  w(0) = k.weight(r);
  return reconstruct(KruskalTensor(std::move(cols), w));
}

Matrix gram_hadamard(const KruskalTensor& k, std::optional<Index> omit) {
  k.validate();
  const Index r = k.rank();
  Matrix g = Matrix::Ones(r, r);
  for (Index n = 0; n < k.order(); ++n) {
    if (omit && *omit == n) continue;
    const auto& f = k.factors[static_cast<std::size_t>(n)];
    g.array() *= (f.transpose() * f).array();
  }
  return g;
}

Matrix pairwise_inner(const KruskalTensor& k) {
  Matrix g = gram_hadamard(k);
  if (k.weights) g = k.weights->asDiagonal() * g * k.weights->asDiagonal();
  return g;
}

OrthogonalityCheck is_orthogonal(const KruskalTensor& k, double tol) {
  if (tol < 0) throw DomainError("is_orthogonal: tol must be non-negative");
  const Matrix p = pairwise_inner(k);
  double max_off = 0.0;
  double max_diag = 0.0;
  for (Index s = 0; s < p.rows(); ++s) {
    max_diag = std::max(max_diag, std::abs(p(s, s)));
    for (Index t = 0; t < p.cols(); ++t) {
      if (s != t) max_off = std::max(max_off, std::abs(p(s, t)));
    }
  }
  const double scale = max_diag > 0.0 ? max_diag : 1.0;
  return {max_off <= tol * scale, max_off};
}

Vector component_norms(const KruskalTensor& k) {
  k.validate();
  Vector delta = Vector::Ones(k.rank());
  for (const auto& f : k.factors) delta.array() *= f.colwise().norm().transpose().array();
  return delta;
}

KruskalTensor rebalance(const KruskalTensor& k) {
  const Vector delta = component_norms(k);
  const double inv_order = 1.0 / static_cast<double>(k.order());
  KruskalTensor out = k;
  for (Index r = 0; r < k.rank(); ++r) {
    if (delta(r) == 0.0) {
      for (auto& f : out.factors) f.col(r).setZero();
      continue;
    }
    const double target = std::pow(delta(r), inv_order);
    for (auto& f : out.factors) f.col(r) *= target / f.col(r).norm();
  }
  return out;
}

double kruskal_norm(const KruskalTensor& k) {
  return std::sqrt(std::max(0.0, pairwise_inner(k).sum()));
}

double relative_error(const DenseTensor& a, const KruskalTensor& k) {
  const double na = norm(a);
  if (na == 0.0) throw DomainError("relative_error: reference tensor has zero norm");
  if (k.dims() != a.dims()) throw ShapeError("relative_error: Kruskal dims differ from tensor dims");
  return norm(a - reconstruct(k)) / na;
}

}  // namespace orank
