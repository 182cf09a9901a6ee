#include "orank/alm.hpp"

#include "orank/errors.hpp"
#include "orank/orthogonalize.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace orank {

namespace {

void require_square_zero_diag(const Matrix& m, Index r, const char* what) {
  if (m.rows() != r || m.cols() != r) {
    throw ShapeError(std::string("ALM state: ") + what + " must be R x R");
  }
  for (Index i = 0; i < r; ++i) {
    if (m(i, i) != 0.0) throw ContractError(std::string("ALM state: ") + what + " needs a zero diagonal");
  }
  if (r > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * m.cwiseAbs().maxCoeff()) {
    throw ContractError(std::string("ALM state: ") + what + " must be symmetric");
  }
}

}  // namespace

AlmState AlmState::initial(KruskalTensor factors, double mu0) {
  AlmState s;
  s.factors = factors.absorb_weights();
  const Index r = s.factors.rank();
  s.lambda = Matrix::Zero(r, r);
  s.penalty = Matrix::Zero(r, r);
  s.mu = mu0;
  return s;
}

void AlmState::validate() const {
  factors.validate();
  const Index r = factors.rank();
  require_square_zero_diag(lambda, r, "lambda");
  require_square_zero_diag(penalty, r, "penalty");
  if ((penalty.array() < 0.0).any()) throw ContractError("ALM state: penalty entries must be nonnegative");
  if (!(mu > 0.0)) throw ContractError("ALM state: mu must be positive");
}

void AlmConfig::validate() const {
  if (rank < 1) throw DomainError("ALM: rank must be at least 1");
  if (!(eps_outer > 0.0) || !(eps_inner > 0.0)) throw DomainError("ALM: tolerances must be positive");
  if (max_outer < 1) throw DomainError("ALM: max_outer must be at least 1");
  if (!(mu0 > 0.0)) throw DomainError("ALM: mu0 must be positive");
  if (!(mu_growth > 1.0)) throw DomainError("ALM: mu_growth must exceed 1");
  inner.validate();
}

std::string_view to_string(AlmStop s) {
  switch (s) {
    case AlmStop::ThetaTol: return "ThetaTol";
    case AlmStop::MaxOuter: return "MaxOuter";
  }
  return "?";
}

Vector flatten(const KruskalTensor& k) {
  Index total = 0;
  for (const auto& f : k.factors) total += f.size();
  Vector v(total);
  Index off = 0;
  for (const auto& f : k.factors) {
    v.segment(off, f.size()) = Eigen::Map<const Vector>(f.data(), f.size());
    off += f.size();
  }
  return v;
}

KruskalTensor unflatten(const Vector& v, std::span<const Index> dims, Index rank) {
  Index total = 0;
  for (Index d : dims) total += d * rank;
  if (v.size() != total) throw ShapeError("unflatten: vector length does not match dims and rank");
  std::vector<Matrix> factors;
  factors.reserve(dims.size());
  Index off = 0;
  for (Index d : dims) {
    factors.push_back(Eigen::Map<const Matrix>(v.data() + off, d, rank));
    off += d * rank;
  }
  return KruskalTensor(std::move(factors));
}

AugmentedLagrangian::AugmentedLagrangian(const DenseTensor& a, Index rank, Matrix lambda,
                                         Matrix penalty)
    : a_(a), rank_(rank), lambda_(std::move(lambda)), penalty_(std::move(penalty)) {
  if (lambda_.rows() != rank || lambda_.cols() != rank || penalty_.rows() != rank ||
      penalty_.cols() != rank) {
    throw ShapeError("augmented Lagrangian: multiplier and penalty matrices must be R x R");
  }
  const double na = norm(a);
  norm_a_sq_ = na * na;
}

double AugmentedLagrangian::operator()(const Vector& v, Vector& grad) const {
  return evaluate(v, &grad);
}

double AugmentedLagrangian::value(const Vector& v) const { return evaluate(v, nullptr); }

double AugmentedLagrangian::evaluate(const Vector& v, Vector* grad) const {
  const auto& dims = a_.dims();
  const Index order = a_.order();
  const KruskalTensor k = unflatten(v, dims, rank_);
  const auto& fs = k.factors;

  std::vector<Matrix> grams;
  grams.reserve(fs.size());
  Matrix h = Matrix::Ones(rank_, rank_);
  for (const auto& f : fs) {
    grams.push_back(f.transpose() * f);
    h.array() *= grams.back().array();
  }

  const Matrix w_last = mttkrp(a_, fs, order - 1);
  const double cross = (w_last.array() * fs.back().array()).sum();
  const double fit = 0.5 * (norm_a_sq_ - 2.0 * cross + h.sum());
  const double value = fit + 0.5 * (lambda_.array() * h.array()).sum() +
                       0.25 * (penalty_.array() * h.array().square()).sum();

  if (grad) {
    grad->resize(v.size());
    Index off = 0;
    for (Index n = 0; n < order; ++n) {
      const auto& vn = fs[static_cast<std::size_t>(n)];
      const Matrix& gn = grams[static_cast<std::size_t>(n)];
      Matrix gamma = Matrix::Ones(rank_, rank_);
      for (Index m = 0; m < order; ++m) {
        if (m != n) gamma.array() *= grams[static_cast<std::size_t>(m)].array();
      }
      const Matrix inner = (gamma.array() * (1.0 + lambda_.array() +
                                             gamma.array() * gn.array() * penalty_.array()))
                               .matrix();
      Matrix gblock = vn * inner;
      if (n == order - 1) {
        gblock -= w_last;
      } else {
        gblock -= mttkrp(a_, fs, n);
      }
      grad->segment(off, gblock.size()) = Eigen::Map<const Vector>(gblock.data(), gblock.size());
      off += gblock.size();
    }
  }
  return value;
}

double objective(const DenseTensor& a, const AlmState& s) {
  if (s.factors.dims() != a.dims()) throw ShapeError("objective: factor shapes do not match tensor");
  const KruskalTensor k = s.factors.absorb_weights();
  AugmentedLagrangian l(a, k.rank(), s.lambda, s.penalty);
  return l.value(flatten(k));
}

std::vector<Matrix> gradient(const DenseTensor& a, const AlmState& s) {
  if (s.factors.dims() != a.dims()) throw ShapeError("gradient: factor shapes do not match tensor");
  const KruskalTensor k = s.factors.absorb_weights();
  AugmentedLagrangian l(a, k.rank(), s.lambda, s.penalty);
  Vector g;
  l(flatten(k), g);
  return unflatten(g, a.dims(), k.rank()).factors;
}

Matrix penalty_matrix(const KruskalTensor& factors, double mu, double delta_floor) {
  if (!(mu > 0.0)) throw DomainError("penalty_matrix: mu must be positive");
  const Vector delta = component_norms(factors);
  Vector h(delta.size());
  for (Index r = 0; r < delta.size(); ++r) {
    if (!(delta(r) > 0.0) || delta(r) < delta_floor) {
      throw DegenerateComponentError(r, "component " + std::to_string(r + 1) +
                                            " has vanishing norm " + std::to_string(delta(r)));
    }
    h(r) = 1.0 / (delta(r) * delta(r));
  }
  Matrix c = mu * h * h.transpose();
  c.diagonal().setZero();
  return c;
}

Matrix update_multipliers(const AlmState& s) {
  Matrix next = s.lambda + (s.penalty.array() * gram_hadamard(s.factors).array()).matrix();
  next.diagonal().setZero();
  return next;
}

double theta(const KruskalTensor& factors) {
  const Index r = factors.rank();
  if (r <= 1) return 0.0;
  std::vector<Matrix> cosines;
  for (const auto& f : factors.factors) {
    const Vector norms = f.colwise().norm().transpose();
    for (Index c = 0; c < r; ++c) {
      if (norms(c) == 0.0) {
        throw DegenerateComponentError(c, "theta: component " + std::to_string(c + 1) +
                                              " has a zero mode vector");
      }
    }
    const Vector inv = norms.cwiseInverse();
    cosines.push_back((inv.asDiagonal() * (f.transpose() * f) * inv.asDiagonal()).cwiseAbs());
  }
  double worst = 0.0;
  for (Index s = 0; s < r; ++s) {
    for (Index t = s + 1; t < r; ++t) {
      double best = cosines.front()(s, t);
      for (const auto& c : cosines) best = std::min(best, c(s, t));
      worst = std::max(worst, best);
    }
  }
  return std::min(worst, 1.0);
}

AlmResult od_alm_fit(const DenseTensor& a, const AlmConfig& cfg, const KruskalTensor& init,
                     const AlmObserver& observer) {
  cfg.validate();
  if (init.rank() != cfg.rank) throw ShapeError("OD-ALM: initial guess has the wrong rank");
  if (init.dims() != a.dims()) throw ShapeError("OD-ALM: initial guess does not match tensor shape");
  const double norm_a = norm(a);
  if (norm_a == 0.0) throw DomainError("OD-ALM: input tensor is zero");
  const double delta_floor = 1e-12 * norm_a;

  const auto t0 = std::chrono::steady_clock::now();
  LbfgsConfig inner = cfg.inner;
  inner.grad_per_entry_tol = cfg.eps_inner;

  AlmState s = AlmState::initial(init, cfg.mu0);
  AlmResult res;
  for (int k = 1; k <= cfg.max_outer; ++k) {
    const KruskalTensor start = rebalance(s.factors);
    s.penalty = penalty_matrix(start, s.mu, delta_floor);

    const AugmentedLagrangian lag(a, cfg.rank, s.lambda, s.penalty);
    const Vector v0 = flatten(start);
    const LbfgsReport rep = lbfgs_minimize(lag, v0, inner);
    s.factors = unflatten(rep.x_final, a.dims(), cfg.rank);
    s.lambda = update_multipliers(s);
    s.mu *= cfg.mu_growth;
    s.k = k;

    TraceRow row;
    row.k = k;
    row.theta = theta(s.factors);
    row.rel_change = (rep.x_final - v0).norm() / v0.norm();
    row.inner_iters = rep.iterations;
    if (cfg.trace_rerr) {
      try {
        row.rerr = projected_relative_error(a, project(a, orthogonalize(s.factors)));
      } catch (const Error&) {
        row.rerr = std::numeric_limits<double>::quiet_NaN();
      }
    } else {
      row.rerr = std::numeric_limits<double>::quiet_NaN();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.trace.rows.push_back(row);

    if (observer) observer(AlmIterationView{k, start, s.factors, s.penalty, rep});

    res.outer_iterations = k;
    if (row.theta < cfg.eps_outer) {
      res.stop = AlmStop::ThetaTol;
      break;
    }
  }
  res.factors = s.factors;
  res.lambda = s.lambda;
  res.mu = s.mu;
  return res;
}

}  // namespace orank
