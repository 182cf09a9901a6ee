#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace orank {

using Index = Eigen::Index;
/// Column-major dense matrix, i.e. first index fastest, same as DenseTensor.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense N-way array stored first-index-fastest.
///
/// Entry (i_1, ..., i_N) lives at offset i_1 + I_1 * (i_2 + I_2 * (i_3 + ...)).
/// All mode indices in this library are zero-based.
class DenseTensor {
 public:
  DenseTensor() = default;

  /// Zero tensor of the given shape.
  explicit DenseTensor(std::vector<Index> dims);
  DenseTensor(std::vector<Index> dims, std::vector<double> values);

  const std::vector<Index>& dims() const noexcept { return dims_; }
  Index order() const noexcept { return static_cast<Index>(dims_.size()); }
  Index dim(Index n) const { return dims_.at(static_cast<std::size_t>(n)); }
  Index size() const noexcept { return static_cast<Index>(values_.size()); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }

  Eigen::Map<const Vector> vec() const { return {values_.data(), size()}; }
  Eigen::Map<Vector> vec() { return {values_.data(), size()}; }

  Index offset(std::span<const Index> index) const;
  double operator()(std::span<const Index> index) const { return values_[offset(index)]; }
  double& operator()(std::span<const Index> index) { return values_[offset(index)]; }
  double operator()(std::initializer_list<Index> index) const {
    return (*this)(std::span<const Index>(index.begin(), index.size()));
  }
  double& operator()(std::initializer_list<Index> index) {
    return (*this)(std::span<const Index>(index.begin(), index.size()));
  }

  /// Product of the dimensions before mode n (stride of mode n).
  Index stride(Index n) const;

 private:
  std::vector<Index> dims_;
  std::vector<double> values_;
};

Index num_entries(std::span<const Index> dims);

/// Advance a first-index-fastest multi-index; returns false after the last one.
bool next_index(std::vector<Index>& index, std::span<const Index> dims);

double inner(const DenseTensor& a, const DenseTensor& b);
double norm(const DenseTensor& a);
/// Angle in [0, pi]; throws DomainError on zero-norm arguments.
double angle(const DenseTensor& a, const DenseTensor& b);

DenseTensor operator-(const DenseTensor& a, const DenseTensor& b);
DenseTensor operator+(const DenseTensor& a, const DenseTensor& b);
DenseTensor operator*(double s, const DenseTensor& a);

/// Mode-n unfolding A_(n), shape I_n x prod_{k != n} I_k (Kolda-Bader column order).
Matrix unfold(const DenseTensor& a, Index n);
/// Inverse of unfold.
DenseTensor fold(const Matrix& m, Index n, std::vector<Index> dims);

/// n-mode product: replaces I_n by m.rows().
DenseTensor mode_product(const DenseTensor& a, const Matrix& m, Index n);
/// (M_1, ..., M_N) . A
DenseTensor multi_mode_product(const DenseTensor& a, std::span<const Matrix> ms);

/// Column-wise Kronecker product; the last matrix varies fastest in the row index.
Matrix khatri_rao(std::span<const Matrix> ms);

/// A_(n) times the Khatri-Rao product of the factors in descending mode order
/// with mode n omitted. Result is I_n x R.
Matrix mttkrp(const DenseTensor& a, std::span<const Matrix> factors, Index n);

struct Hosvd {
  DenseTensor core;
  std::vector<Matrix> us;      // square orthogonal, one per mode
  std::vector<Index> nranks;   // numerical n-ranks
};

/// Higher-order SVD. Singular values of A_(n) at or below eps * sigma_max count
/// as zero and the matching core slices are zeroed.
Hosvd hosvd(const DenseTensor& a, double eps = 1e-10);

}  // namespace orank
