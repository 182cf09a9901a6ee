#include "orank/commands.hpp"

#include "orank/cp_als.hpp"
#include "orank/errors.hpp"
#include "orank/orthogonalize.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace orank {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Method parse_method(std::string_view s) {
  if (s == "cp-als") return Method::CpAls;
  if (s == "od-alm") return Method::OdAlm;
  throw InputError("unknown method '" + std::string(s) + "'");
}

std::string_view to_string(Method m) { return m == Method::CpAls ? "cp-als" : "od-alm"; }

double default_tolerance(const DenseTensor& a) { return a.size() > 1000000 ? 1e-3 : 1e-4; }

Decomposition decompose(const DenseTensor& a, const DecomposeOptions& opt) {
  if (opt.rank < 1) throw InputError("rank must be at least 1");
  if (norm(a) == 0.0) throw InputError("input tensor is zero");
  const auto t0 = std::chrono::steady_clock::now();
  Decomposition d;
  d.method = opt.method;

  AlsConfig als;
  als.rank = opt.rank;
  als.max_iters = opt.als_max_iters;
  als.seed = opt.seed;
  const KruskalTensor init = hosvd_init(a, opt.rank, opt.seed);

  if (opt.method == Method::CpAls) {
    als.rel_fn_tol = opt.als_tol;
    AlsResult r = als_fit(a, als, init);
    d.model = std::move(r.model);
    d.trace = std::move(r.trace);
    d.iterations = r.sweeps;
    d.stop = r.converged ? "converged" : "max-iters";
    d.seconds = seconds_since(t0);
    d.rerr = relative_error(a, d.model);
    try {
      d.theta = theta(d.model);
    } catch (const DegenerateComponentError&) {
      d.theta = std::numeric_limits<double>::quiet_NaN();
    }
    return d;
  }

  als.rel_fn_tol = opt.als_init_tol;
  const AlsResult warm = als_fit(a, als, init);

  AlmConfig cfg;
  cfg.rank = opt.rank;
  cfg.eps_inner = opt.eps_inner.value_or(default_tolerance(a));
  cfg.eps_outer = opt.eps_outer.value_or(default_tolerance(a));
  cfg.max_outer = opt.max_outer;
  cfg.mu0 = opt.mu0;
  cfg.mu_growth = opt.mu_growth;
  AlmResult r = od_alm_fit(a, cfg, warm.model);

  OrthonormalRankOneList list = project(a, orthogonalize(r.factors));
  d.seconds = seconds_since(t0);
  d.model = list.to_kruskal();
  d.trace = std::move(r.trace);
  d.iterations = r.outer_iterations;
  d.stop = std::string(to_string(r.stop));
  d.theta = d.trace.empty() ? 0.0 : d.trace.back().theta;
  d.rerr = relative_error(a, d.model);
  return d;
}

void print_summary(std::ostream& os, const Decomposition& d) {
  os << "method: " << to_string(d.method) << '\n'
     << "rerr: " << format_double(d.rerr) << '\n'
     << "seconds: " << format_double(d.seconds) << '\n'
     << "iterations: " << d.iterations << '\n'
     << "stop: " << d.stop << '\n'
     << "theta: " << format_double(d.theta) << '\n';
}

EvalReport evaluate(const DenseTensor& a, const KruskalTensor& k) {
  if (k.dims() != a.dims()) throw ShapeError("eval: decomposition shape does not match tensor");
  EvalReport r;
  r.rerr = relative_error(a, k);
  r.theta = theta(k);
  r.max_offdiag = is_orthogonal(k, 0.0).max_offdiag;
  for (const auto& f : k.factors) {
    Vector inv = f.colwise().norm().transpose();
    for (Index c = 0; c < inv.size(); ++c) inv(c) = inv(c) > 0.0 ? 1.0 / inv(c) : 0.0;
    const Matrix u = f * inv.asDiagonal();
    r.normalized_grams.push_back(u.transpose() * u);
  }
  return r;
}

void print_eval(std::ostream& os, const EvalReport& r) {
  os << "rerr: " << format_double(r.rerr) << '\n'
     << "theta: " << format_double(r.theta) << '\n'
     << "max_offdiag: " << format_double(r.max_offdiag) << '\n';
  for (std::size_t n = 0; n < r.normalized_grams.size(); ++n) {
    os << "gram mode " << n + 1 << ":\n";
    const Matrix& g = r.normalized_grams[n];
    for (Index i = 0; i < g.rows(); ++i) {
      for (Index j = 0; j < g.cols(); ++j) os << (j ? " " : "") << format_double(g(i, j));
      os << '\n';
    }
  }
}

std::vector<BenchRow> bench(const BenchOptions& opt) {
  if (opt.repeats < 1) throw InputError("bench: repeats must be at least 1");
  const std::vector<std::pair<std::string, TensorKind>> suite{
      {"A1", TensorKind::Random},
      {"A2", TensorKind::LowRank},
      {"A3", TensorKind::Hilbert},
      {"A4", TensorKind::OrthNoise}};
  std::vector<BenchRow> rows;
  for (const auto& [name, kind] : suite) {
    for (Method m : opt.methods) {
      BenchRow row{name, m, opt.repeats, 0.0, 0.0, 0.0};
      for (int j = 0; j < opt.repeats; ++j) {
        const std::uint64_t seed = opt.seed + static_cast<std::uint64_t>(j);
        const DenseTensor a = generate(kind, opt.dims, opt.rank, opt.noise_level, seed);
        DecomposeOptions d = opt.base;
        d.method = m;
        d.rank = opt.rank;
        d.seed = seed;
        const Decomposition res = decompose(a, d);
        row.mean_seconds += res.seconds;
        row.mean_rerr += res.rerr;
        row.mean_iter += res.iterations;
      }
      row.mean_seconds /= opt.repeats;
      row.mean_rerr /= opt.repeats;
      row.mean_iter /= opt.repeats;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows, bool timing) {
  os << "tensor,method,repeats," << (timing ? "mean_seconds," : "") << "mean_rerr,mean_iter\n";
  for (const auto& r : rows) {
    os << r.tensor << ',' << to_string(r.method) << ',' << r.repeats << ',';
    if (timing) os << format_double(r.mean_seconds) << ',';
    os << format_double(r.mean_rerr) << ',' << format_double(r.mean_iter) << '\n';
  }
}

}  // namespace orank
