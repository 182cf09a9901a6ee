#include "orank/orthogonalize.hpp"

#include "orank/cp_als.hpp"
#include "orank/errors.hpp"

#include <cmath>
#include <string>

namespace orank {

namespace {

constexpr double kSpanTol = 1e-10;

// u minus its least-squares projection onto the columns of b, applied twice so
// that the result stays orthogonal to b when much of u cancels.
Vector project_off(const Matrix& b, const Matrix& pinv_gram, Vector u) {
  for (int pass = 0; pass < 2; ++pass) u -= b * (pinv_gram * (b.transpose() * u));
  return u;
}

}  // namespace

std::vector<Index> OrthonormalRankOneList::dims() const {
  std::vector<Index> d;
  for (const auto& f : factors) d.push_back(f.rows());
  return d;
}

KruskalTensor OrthonormalRankOneList::to_kruskal() const {
  return KruskalTensor(factors, sigma ? sigma : std::optional<Vector>(Vector::Ones(rank())));
}

OrthonormalRankOneList orthogonalize(const KruskalTensor& k, const OrthogonalizeStep& on_step) {
  k.validate();
  const Index order = k.order();
  const Index rank = k.rank();

  OrthonormalRankOneList out;
  out.factors = k.factors;
  for (auto& f : out.factors) {
    for (Index r = 0; r < rank; ++r) {
      const double nr = f.col(r).norm();
      if (nr == 0.0) {
        throw DegenerateComponentError(static_cast<std::size_t>(r),
                                       "orthogonalize: component " + std::to_string(r + 1) +
                                           " has a zero mode vector");
      }
      f.col(r) /= nr;
    }
  }
  auto& u = out.factors;

  std::vector<Index> chosen;
  for (Index ell = 1; ell < rank; ++ell) {
    chosen.assign(static_cast<std::size_t>(ell), 0);
    for (Index r = 0; r < ell; ++r) {
      double best = std::abs(u[0].col(ell).dot(u[0].col(r)));
      for (Index n = 1; n < order; ++n) {
        const double p = std::abs(u[static_cast<std::size_t>(n)].col(ell).dot(u[static_cast<std::size_t>(n)].col(r)));
        if (p < best) {
          best = p;
          chosen[static_cast<std::size_t>(r)] = n;
        }
      }
    }

    for (Index n = 0; n < order; ++n) {
      auto& f = u[static_cast<std::size_t>(n)];
      std::vector<Index> cols;
      for (Index r = 0; r < ell; ++r) {
        if (chosen[static_cast<std::size_t>(r)] == n) cols.push_back(r);
      }
      if (cols.empty()) continue;
      Matrix b(f.rows(), static_cast<Index>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j) b.col(static_cast<Index>(j)) = f.col(cols[j]);
      const Matrix pinv_gram = symmetric_pinv(b.transpose() * b);

      Vector w = project_off(b, pinv_gram, f.col(ell));
      double nw = w.norm();
      if (nw < kSpanTol) {
        for (Index i = 0; i < f.rows() && nw < kSpanTol; ++i) {
          w = project_off(b, pinv_gram, Vector::Unit(f.rows(), i));
          nw = w.norm();
        }
        if (nw < kSpanTol) {
          throw DegenerateComponentError(static_cast<std::size_t>(ell),
                                         "orthogonalize: no direction orthogonal to the earlier "
                                         "components is left in mode " + std::to_string(n + 1) +
                                             " for component " + std::to_string(ell + 1));
        }
      }
      f.col(ell) = w / nw;
    }
    if (on_step) on_step(ell, u);
  }
  return out;
}

OrthonormalRankOneList project(const DenseTensor& a, OrthonormalRankOneList list) {
  if (list.dims() != a.dims()) throw ShapeError("project: list shape does not match tensor");
  const Index last = a.order() - 1;
  const Matrix w = mttkrp(a, list.factors, last);
  list.sigma = (w.array() * list.factors.back().array()).colwise().sum().transpose();
  return list;
}

double projected_relative_error(const DenseTensor& a, const OrthonormalRankOneList& list) {
  if (!list.sigma) throw ContractError("projected_relative_error: list has no coefficients");
  const double na = norm(a);
  if (na == 0.0) throw DomainError("projected_relative_error: input tensor is zero");
  const double rest = na * na - list.sigma->squaredNorm();
  return std::sqrt(std::max(0.0, rest)) / na;
}

}  // namespace orank
