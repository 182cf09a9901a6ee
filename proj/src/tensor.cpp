#include "orank/tensor.hpp"

#include "orank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace orank {

namespace {

std::string dims_string(std::span<const Index> dims) {
  std::string s = "(";
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (k) s += "x";
    s += std::to_string(dims[k]);
  }
  return s + ")";
}

void require_same_dims(const DenseTensor& a, const DenseTensor& b, const char* op) {
  if (a.dims() != b.dims()) {
    throw ShapeError(std::string(op) + ": dimension mismatch " + dims_string(a.dims()) + " vs " +
                     dims_string(b.dims()));
  }
}

void require_mode(const DenseTensor& a, Index n) {
  if (n < 0 || n >= a.order()) {
    throw DomainError("mode " + std::to_string(n) + " out of range for order-" +
                      std::to_string(a.order()) + " tensor");
  }
}

Index product(std::span<const Index> dims, Index first, Index last) {
  Index p = 1;
  for (Index k = first; k < last; ++k) p *= dims[static_cast<std::size_t>(k)];
  return p;
}

}  // namespace

Index num_entries(std::span<const Index> dims) {
  return std::accumulate(dims.begin(), dims.end(), Index{1}, std::multiplies<>());
}

bool next_index(std::vector<Index>& index, std::span<const Index> dims) {
  for (std::size_t k = 0; k < index.size(); ++k) {
    if (++index[k] < dims[k]) return true;
    index[k] = 0;
  }
  return false;
}

DenseTensor::DenseTensor(std::vector<Index> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ShapeError("tensor must have at least one mode");
  for (Index d : dims_) {
    if (d < 1) throw ShapeError("tensor dimensions must be positive, got " + dims_string(dims_));
  }
  values_.assign(static_cast<std::size_t>(num_entries(dims_)), 0.0);
}

DenseTensor::DenseTensor(std::vector<Index> dims, std::vector<double> values)
    : DenseTensor(std::move(dims)) {
  if (static_cast<Index>(values.size()) != size()) {
    throw ShapeError("value count " + std::to_string(values.size()) + " does not match dims " +
                     dims_string(dims_));
  }
  values_ = std::move(values);
}

Index DenseTensor::offset(std::span<const Index> index) const {
  if (static_cast<Index>(index.size()) != order()) throw ShapeError("index arity mismatch");
  Index off = 0;
  for (Index k = order() - 1; k >= 0; --k) {
    const auto i = index[static_cast<std::size_t>(k)];
    if (i < 0 || i >= dims_[static_cast<std::size_t>(k)]) throw DomainError("index out of range");
    off = off * dims_[static_cast<std::size_t>(k)] + i;
  }
  return off;
}

Index DenseTensor::stride(Index n) const { return product(dims_, 0, n); }

double inner(const DenseTensor& a, const DenseTensor& b) {
  require_same_dims(a, b, "inner");
  return a.vec().dot(b.vec());
}

double norm(const DenseTensor& a) { return a.vec().norm(); }

double angle(const DenseTensor& a, const DenseTensor& b) {
  require_same_dims(a, b, "angle");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw DomainError("angle: zero-norm argument");
  const double c = std::clamp(inner(a, b) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

DenseTensor operator-(const DenseTensor& a, const DenseTensor& b) {
  require_same_dims(a, b, "subtract");
  DenseTensor out(a.dims());
  out.vec() = a.vec() - b.vec();
  return out;
}

DenseTensor operator+(const DenseTensor& a, const DenseTensor& b) {
  require_same_dims(a, b, "add");
  DenseTensor out(a.dims());
  out.vec() = a.vec() + b.vec();
  return out;
}

DenseTensor operator*(double s, const DenseTensor& a) {
  DenseTensor out(a.dims());
  out.vec() = s * a.vec();
  return out;
}

Matrix unfold(const DenseTensor& a, Index n) {
  require_mode(a, n);
  const auto& d = a.dims();
  const Index left = product(d, 0, n);
  const Index in = a.dim(n);
  const Index right = product(d, n + 1, a.order());
  Matrix out(in, left * right);
  if (n == 0) {
    out = Eigen::Map<const Matrix>(a.data(), in, right);
    return out;
  }
  for (Index j = 0; j < right; ++j) {
    // slab j is a left x in column-major block
    Eigen::Map<const Matrix> slab(a.data() + left * in * j, left, in);
    out.middleCols(left * j, left) = slab.transpose();
  }
  return out;
}

DenseTensor fold(const Matrix& m, Index n, std::vector<Index> dims) {
  DenseTensor out(std::move(dims));
  require_mode(out, n);
  const auto& d = out.dims();
  const Index left = product(d, 0, n);
  const Index in = out.dim(n);
  const Index right = product(d, n + 1, out.order());
  if (m.rows() != in || m.cols() != left * right) throw ShapeError("fold: matrix shape mismatch");
  for (Index j = 0; j < right; ++j) {
    Eigen::Map<Matrix> slab(out.data() + left * in * j, left, in);
    slab = m.middleCols(left * j, left).transpose();
  }
  return out;
}

DenseTensor mode_product(const DenseTensor& a, const Matrix& m, Index n) {
  require_mode(a, n);
  if (m.cols() != a.dim(n)) {
    throw ShapeError("mode_product: matrix has " + std::to_string(m.cols()) +
                     " columns, mode " + std::to_string(n) + " has size " +
                     std::to_string(a.dim(n)));
  }
  auto dims = a.dims();
  const Index left = product(dims, 0, n);
  const Index in = a.dim(n);
  const Index right = product(dims, n + 1, a.order());
  dims[static_cast<std::size_t>(n)] = m.rows();
  DenseTensor out(std::move(dims));
  if (out.size() == 0) return out;
  const Index jn = m.rows();
  for (Index j = 0; j < right; ++j) {
    Eigen::Map<const Matrix> src(a.data() + left * in * j, left, in);
    Eigen::Map<Matrix> dst(out.data() + left * jn * j, left, jn);
    dst.noalias() = src * m.transpose();
  }
  return out;
}

DenseTensor multi_mode_product(const DenseTensor& a, std::span<const Matrix> ms) {
  if (static_cast<Index>(ms.size()) != a.order()) {
    throw ShapeError("multi_mode_product: need one matrix per mode");
  }
  DenseTensor out = a;
  for (Index n = 0; n < a.order(); ++n) out = mode_product(out, ms[static_cast<std::size_t>(n)], n);
  return out;
}

Matrix khatri_rao(std::span<const Matrix> ms) {
  if (ms.empty()) throw ShapeError("khatri_rao: empty operand list");
  const Index r = ms.front().cols();
  Index rows = 1;
  for (const auto& m : ms) {
    if (m.cols() != r) throw ShapeError("khatri_rao: column counts differ");
    rows *= m.rows();
  }
  Matrix out(rows, r);
  Vector col, next;
  for (Index c = 0; c < r; ++c) {
    col = ms.front().col(c);
    for (std::size_t k = 1; k < ms.size(); ++k) {
      const auto& m = ms[k];
      next.resize(col.size() * m.rows());
      for (Index i = 0; i < col.size(); ++i) next.segment(i * m.rows(), m.rows()) = col(i) * m.col(c);
      col.swap(next);
    }
    out.col(c) = col;
  }
  return out;
}

Matrix mttkrp(const DenseTensor& a, std::span<const Matrix> factors, Index n) {
  require_mode(a, n);
  if (static_cast<Index>(factors.size()) != a.order()) {
    throw ShapeError("mttkrp: need one factor per mode");
  }
  const Index r = factors.front().cols();
  for (Index k = 0; k < a.order(); ++k) {
    const auto& f = factors[static_cast<std::size_t>(k)];
    if (f.cols() != r) throw ShapeError("mttkrp: factor column counts differ");
    if (f.rows() != a.dim(k)) throw ShapeError("mttkrp: factor rows do not match tensor dims");
  }
  const auto& d = a.dims();
  const Index left = product(d, 0, n);
  const Index in = a.dim(n);
  const Index right = product(d, n + 1, a.order());

  auto descending = [&](Index first, Index last) {
    // Khatri-Rao of factors[last-1], ..., factors[first]; ones(1, r) if empty.
    if (first >= last) return Matrix(Matrix::Ones(1, r));
    std::vector<Matrix> ms;
    for (Index k = last - 1; k >= first; --k) ms.push_back(factors[static_cast<std::size_t>(k)]);
    return khatri_rao(ms);
  };
  const Matrix kl = descending(0, n);
  const Matrix kr = descending(n + 1, a.order());

  Matrix out(in, r);
  if (right >= left) {
    Eigen::Map<const Matrix> amat(a.data(), left * in, right);
    const Matrix t = amat * kr;
    for (Index c = 0; c < r; ++c) {
      Eigen::Map<const Matrix> tc(t.col(c).data(), left, in);
      out.col(c).noalias() = tc.transpose() * kl.col(c);
    }
  } else {
    Eigen::Map<const Matrix> amat(a.data(), left, in * right);
    const Matrix t = amat.transpose() * kl;
    for (Index c = 0; c < r; ++c) {
      Eigen::Map<const Matrix> tc(t.col(c).data(), in, right);
      out.col(c).noalias() = tc * kr.col(c);
    }
  }
  return out;
}

Hosvd hosvd(const DenseTensor& a, double eps) {
  if (eps < 0) throw DomainError("hosvd: eps must be non-negative");
  Hosvd h;
  const Index order = a.order();
  h.us.reserve(static_cast<std::size_t>(order));
  h.nranks.reserve(static_cast<std::size_t>(order));
  for (Index n = 0; n < order; ++n) {
    const Matrix an = unfold(a, n);
    Eigen::JacobiSVD<Matrix, Eigen::ColPivHouseholderQRPreconditioner> svd(an, Eigen::ComputeFullU);
    const Vector& s = svd.singularValues();
    Index rank = 0;
    if (s.size() > 0 && s(0) > 0.0) {
      const double cutoff = eps * s(0);
      while (rank < s.size() && s(rank) > cutoff) ++rank;
    }
    h.us.push_back(svd.matrixU());
    h.nranks.push_back(rank);
  }
  std::vector<Matrix> uts;
  for (const auto& u : h.us) uts.push_back(u.transpose());
  h.core = multi_mode_product(a, uts);

  std::vector<Index> idx(static_cast<std::size_t>(order), 0);
  Index off = 0;
  do {
    for (Index k = 0; k < order; ++k) {
      if (idx[static_cast<std::size_t>(k)] >= h.nranks[static_cast<std::size_t>(k)]) {
        h.core.data()[off] = 0.0;
        break;
      }
    }
    ++off;
  } while (next_index(idx, a.dims()));
  return h;
}

}  // namespace orank
