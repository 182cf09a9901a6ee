#pragma once

#include "orank/tensor.hpp"

#include <functional>
#include <string_view>

namespace orank {

/// Smooth objective: returns f(x) and writes the gradient into `grad`
/// (already sized like x).
using ObjectiveFn = std::function<double(const Vector& x, Vector& grad)>;

struct LbfgsConfig {
  int memory = 20;
  int max_iters = 500;
  double rel_change_tol = 1e-8;     // ||x_{j+1} - x_j|| / max(1, ||x_j||)
  double grad_per_entry_tol = 1e-4; // ||g||_2 / len(x)
  double ls_ftol = 1e-4;
  double ls_gtol = 1e-2;
  double ls_step0 = 1.0;
  int ls_max_iters = 20;            // trial evaluations per line search

  void validate() const;
};

enum class LbfgsStop { RelChange, GradTol, MaxIters, LineSearchFail };

std::string_view to_string(LbfgsStop s);

struct LbfgsReport {
  Vector x_final;
  double f_final = 0.0;
  double grad_norm_final = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStop stop_reason = LbfgsStop::MaxIters;
};

struct LineSearchResult {
  double step = 0.0;
  int evals = 0;
  bool converged = false;  // strong Wolfe conditions hold at `step`
  double f = 0.0;          // objective at x + step * d
  Vector x;
  Vector grad;
};

/// Moré-Thuente line search (MINPACK-2 dcsrch/dcstep) along d from x.
///
/// f0/g0 are the value and gradient at x. Requires d^T g0 < 0 (ContractError
/// otherwise). On success the returned step satisfies the strong Wolfe
/// conditions with (ls_ftol, ls_gtol). If the search runs out of trials it
/// returns the lowest trial point found with converged = false.
LineSearchResult more_thuente_search(const ObjectiveFn& f, const Vector& x, double f0,
                                     const Vector& g0, const Vector& d, const LbfgsConfig& cfg);

/// Convenience overload that evaluates f at x first.
LineSearchResult more_thuente_search(const ObjectiveFn& f, const Vector& x, const Vector& d,
                                     const LbfgsConfig& cfg);

/// Limited-memory BFGS with two-loop recursion and Moré-Thuente steps.
/// Throws NumericalError if the objective returns a non-finite value.
LbfgsReport lbfgs_minimize(const ObjectiveFn& f, Vector x0, const LbfgsConfig& cfg);

/// Two-loop recursion: returns -H g for the stored curvature pairs (oldest first).
/// With no pairs this is exactly -g.
Vector two_loop_direction(const Vector& g, const std::vector<Vector>& s_hist,
                          const std::vector<Vector>& y_hist);

}  // namespace orank
