#include "orank/random.hpp"

namespace orank {

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

DenseTensor random_tensor(std::vector<Index> dims, Rng& rng) {
  DenseTensor t(std::move(dims));
  for (double& v : t.values()) v = rng.normal();
  return t;
}

Matrix random_orthogonal(Index n, Rng& rng) {
  const Matrix g = random_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace orank
