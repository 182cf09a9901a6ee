#pragma once

#include "orank/kruskal.hpp"
#include "orank/lbfgs.hpp"
#include "orank/trace.hpp"

#include <functional>
#include <string_view>

namespace orank {

/// Outer-iteration state of the augmented Lagrangian method.
///
/// lambda and penalty are R x R, symmetric, with zero diagonals; they hold the
/// multipliers lambda_st and the penalty weights c_st of the constraints
/// prod_n <v_s^(n), v_t^(n)> = 0, s != t.
struct AlmState {
  int k = 0;
  KruskalTensor factors;
  Matrix lambda;
  Matrix penalty;
  double mu = 1.0;

  /// Fresh state: zero multipliers and penalties, mu = mu0.
  static AlmState initial(KruskalTensor factors, double mu0 = 1.0);
  void validate() const;
};

struct AlmConfig {
  Index rank = 1;
  double eps_outer = 1e-4;
  double eps_inner = 1e-4;
  int max_outer = 25;
  double mu0 = 1.0;
  double mu_growth = 10.0;
  LbfgsConfig inner{};
  /// Orthogonalize + project after every outer iteration to fill TraceRow::rerr.
  /// Reporting only; the iterate itself is never orthogonalized.
  bool trace_rerr = true;

  void validate() const;
};

enum class AlmStop { ThetaTol, MaxOuter };

std::string_view to_string(AlmStop s);

/// Passed to an AlmObserver once per outer iteration.
struct AlmIterationView {
  int k;                        // 1-based index of the finished outer iteration
  const KruskalTensor& start;   // rebalanced warm start handed to L-BFGS
  const KruskalTensor& result;  // subproblem minimizer
  const Matrix& penalty;        // C used for this subproblem
  const LbfgsReport& inner;
};

using AlmObserver = std::function<void(const AlmIterationView&)>;

struct AlmResult {
  KruskalTensor factors;  // final iterate, not exactly orthogonal
  RunTrace trace;
  AlmStop stop = AlmStop::MaxOuter;
  int outer_iterations = 0;
  Matrix lambda;
  double mu = 0.0;
};

/// Augmented Lagrangian value
///   F(v) + 1/2 sum_{s!=t} lambda_st h_st + 1/4 sum_{s!=t} c_st h_st^2,
/// with F(v) = 1/2 ||a - reconstruct(v)||^2 and h = gram_hadamard(v).
double objective(const DenseTensor& a, const AlmState& s);

/// Partial derivatives, one I_n x R block per mode:
///   -A_(n) V^(-n) + V^(n) (Gamma + Gamma.*Lambda + Gamma.*Gamma.*V^(n)'V^(n).*C).
std::vector<Matrix> gradient(const DenseTensor& a, const AlmState& s);

/// C = mu h^T h with h_r = 1/delta_r^2 and a zero diagonal. Throws
/// DegenerateComponentError when some delta_r < delta_floor or is zero.
Matrix penalty_matrix(const KruskalTensor& factors, double mu, double delta_floor = 0.0);

/// Lambda + C .* gram_hadamard(factors), diagonal kept at zero.
Matrix update_multipliers(const AlmState& s);

/// max_{s!=t} min_n |<v_s^(n), v_t^(n)>| / (||v_s^(n)|| ||v_t^(n)||); 0 when R = 1.
double theta(const KruskalTensor& factors);

/// Flattening [v_1^(1); ...; v_R^(1); ...; v_1^(N); ...; v_R^(N)].
Vector flatten(const KruskalTensor& k);
KruskalTensor unflatten(const Vector& v, std::span<const Index> dims, Index rank);

/// Evaluates the augmented Lagrangian and its gradient on flattened variables,
/// sharing the MTTKRP work between value and gradient.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const DenseTensor& a, Index rank, Matrix lambda, Matrix penalty);

  double operator()(const Vector& v, Vector& grad) const;
  double value(const Vector& v) const;

 private:
  double evaluate(const Vector& v, Vector* grad) const;

  const DenseTensor& a_;
  Index rank_;
  Matrix lambda_;
  Matrix penalty_;
  double norm_a_sq_;
};

/// Orthogonal rank-R approximation by the augmented Lagrangian method.
///
/// Each outer iteration rebalances the factors, rebuilds the penalty weights,
/// minimizes the Lagrangian with L-BFGS warm-started at the current iterate,
/// updates the multipliers and multiplies mu by mu_growth. Stops once
/// theta < eps_outer or after max_outer iterations.
AlmResult od_alm_fit(const DenseTensor& a, const AlmConfig& cfg, const KruskalTensor& init,
                     const AlmObserver& observer = {});

}  // namespace orank
