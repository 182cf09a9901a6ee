#pragma once

#include "orank/alm.hpp"
#include "orank/generators.hpp"
#include "orank/io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace orank {

enum class Method { CpAls, OdAlm };

/// "cp-als" or "od-alm"; InputError otherwise.
Method parse_method(std::string_view s);
std::string_view to_string(Method m);

struct DecomposeOptions {
  Method method = Method::OdAlm;
  Index rank = 1;
  std::uint64_t seed = 0;
  /// Unset tolerances default to 1e-4, or 1e-3 for inputs with more than 1e6 entries.
  std::optional<double> eps_inner;
  std::optional<double> eps_outer;
  int max_outer = 25;
  double mu0 = 1.0;
  double mu_growth = 10.0;
  /// CP-ALS settings: the standalone baseline and the OD-ALM initializer.
  double als_tol = 1e-8;
  double als_init_tol = 1e-6;
  int als_max_iters = 500;
};

struct Decomposition {
  Method method = Method::OdAlm;
  /// cp-als: the ALS factors. od-alm: orthonormal factors weighted by the projection.
  KruskalTensor model;
  RunTrace trace;
  double rerr = 0.0;
  double seconds = 0.0;
  int iterations = 0;  // outer iterations for od-alm, sweeps for cp-als
  std::string stop;
  double theta = 0.0;  // final theta of the iterate before orthogonalization (od-alm)
};

double default_tolerance(const DenseTensor& a);

/// cp-als: ALS from the truncated HOSVD. od-alm: HOSVD -> ALS -> augmented
/// Lagrangian -> orthogonalize -> project.
Decomposition decompose(const DenseTensor& a, const DecomposeOptions& opt);

void print_summary(std::ostream& os, const Decomposition& d);

struct EvalReport {
  double rerr = 0.0;
  double theta = 0.0;
  double max_offdiag = 0.0;
  std::vector<Matrix> normalized_grams;  // U^(n)' U^(n) with unit columns
};

EvalReport evaluate(const DenseTensor& a, const KruskalTensor& k);
void print_eval(std::ostream& os, const EvalReport& r);

struct BenchOptions {
  std::vector<Method> methods{Method::CpAls, Method::OdAlm};
  int repeats = 10;
  std::uint64_t seed = 0;
  std::vector<Index> dims{20, 16, 10, 32};
  Index rank = 5;
  double noise_level = 0.1;
  bool timing = true;  // false drops the seconds column, making output reproducible
  DecomposeOptions base{};
};

struct BenchRow {
  std::string tensor;
  Method method;
  int repeats;
  double mean_seconds;
  double mean_rerr;
  double mean_iter;
};

/// Runs every method on A1 (random), A2 (lowrank), A3 (hilbert) and A4
/// (orth-noise); repeat j uses seed + j for generation and the solver.
std::vector<BenchRow> bench(const BenchOptions& opt);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool timing);

}  // namespace orank
