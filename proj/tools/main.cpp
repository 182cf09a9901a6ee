#include "orank/commands.hpp"
#include "orank/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace orank;

constexpr int kInputError = 2;
constexpr int kDegenerate = 3;

struct Shared {
  std::vector<Index> dims;
  Index rank = 5;
  std::uint64_t seed = 0;
  std::string method = "od-alm";
  std::optional<double> eps_inner;
  std::optional<double> eps_outer;
  int max_outer = 25;
  double mu0 = 1.0;
  double mu_growth = 10.0;
  std::string out;
  std::string trace;
  std::string format = "text";
  double noise_level = 0.1;
};

void add_solver_flags(CLI::App* cmd, Shared& s) {
  cmd->add_option("--rank", s.rank, "Number of rank-one terms")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", s.seed, "Random seed");
  cmd->add_option("--eps-inner", s.eps_inner, "L-BFGS gradient tolerance (per entry)")->check(CLI::PositiveNumber);
  cmd->add_option("--eps-outer", s.eps_outer, "Stop once theta falls below this")->check(CLI::PositiveNumber);
  cmd->add_option("--max-outer", s.max_outer, "Cap on outer iterations")->check(CLI::PositiveNumber);
  cmd->add_option("--mu0", s.mu0, "Initial penalty scale")->check(CLI::PositiveNumber);
  cmd->add_option("--mu-growth", s.mu_growth, "Penalty growth factor per outer iteration");
}

DecomposeOptions decompose_options(const Shared& s) {
  DecomposeOptions d;
  d.method = parse_method(s.method);
  d.rank = s.rank;
  d.seed = s.seed;
  d.eps_inner = s.eps_inner;
  d.eps_outer = s.eps_outer;
  d.max_outer = s.max_outer;
  d.mu0 = s.mu0;
  d.mu_growth = s.mu_growth;
  return d;
}

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> ms;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto end = comma == std::string::npos ? list.size() : comma;
    ms.push_back(parse_method(list.substr(start, end - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return ms;
}

template <class F>
void write_or_print(const std::string& path, F f) {
  if (path.empty() || path == "-") {
    f(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open '" + path + "' for writing");
  f(os);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orthogonal low-rank tensor approximation"};
  app.require_subcommand(1);
  Shared s;

  std::string kind;
  auto* gen = app.add_subcommand("gen", "Generate a test tensor");
  gen->add_option("kind", kind, "random | lowrank | hilbert | orth-noise")->required();
  gen->add_option("--dims", s.dims, "Dimensions, e.g. 20,16,10,32")->delimiter(',')->required();
  gen->add_option("--rank", s.rank, "Rank for lowrank and orth-noise")->check(CLI::PositiveNumber);
  gen->add_option("--seed", s.seed, "Random seed");
  gen->add_option("--noise-level", s.noise_level, "Relative noise for orth-noise")->check(CLI::NonNegativeNumber);
  gen->add_option("--format", s.format, "text | binary")->check(CLI::IsMember({"text", "binary"}));
  gen->add_option("--out", s.out, "Output file (stdout if omitted)");

  std::string input;
  auto* dec = app.add_subcommand("decompose", "Fit a rank-R decomposition");
  dec->add_option("input", input, "Tensor file")->required();
  dec->add_option("--method", s.method, "cp-als | od-alm")->check(CLI::IsMember({"cp-als", "od-alm"}));
  add_solver_flags(dec, s);
  dec->add_option("--out", s.out, "Write the decomposition here");
  dec->add_option("--trace", s.trace, "Write the per-iteration trace CSV here");

  std::string kfile;
  auto* ev = app.add_subcommand("eval", "Report error and orthogonality of a decomposition");
  ev->add_option("tensor", input, "Tensor file")->required();
  ev->add_option("kruskal", kfile, "Decomposition file")->required();

  std::string methods = "cp-als,od-alm";
  std::string suite = "synthetic";
  int repeats = 10;
  bool no_time = false;
  s.dims = {20, 16, 10, 32};
  auto* be = app.add_subcommand("bench", "Run the synthetic benchmark suite");
  be->add_option("--suite", suite, "Benchmark suite")->check(CLI::IsMember({"synthetic"}));
  be->add_option("--method", methods, "Comma-separated methods");
  be->add_option("--repeats", repeats, "Runs per tensor and method")->check(CLI::PositiveNumber);
  be->add_option("--dims", s.dims, "Tensor dimensions")->delimiter(',');
  be->add_option("--noise-level", s.noise_level, "Noise level of A4")->check(CLI::NonNegativeNumber);
  be->add_flag("--no-time", no_time, "Omit timings so output is reproducible");
  be->add_option("--out", s.out, "CSV output file (stdout if omitted)");
  add_solver_flags(be, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*gen) {
      const DenseTensor a = generate(parse_tensor_kind(kind), s.dims, s.rank, s.noise_level, s.seed);
      const auto fmt = parse_tensor_format(s.format);
      write_or_print(s.out, [&](std::ostream& os) { write_tensor(os, a, fmt); });
    } else if (*dec) {
      const DenseTensor a = load_tensor(input);
      const Decomposition d = decompose(a, decompose_options(s));
      if (!s.out.empty()) save_kruskal(s.out, d.model);
      if (!s.trace.empty()) save_trace_csv(s.trace, d.trace);
      print_summary(std::cout, d);
    } else if (*ev) {
      const DenseTensor a = load_tensor(input);
      print_eval(std::cout, evaluate(a, load_kruskal(kfile)));
    } else if (*be) {
      BenchOptions b;
      b.methods = parse_methods(methods);
      b.repeats = repeats;
      b.seed = s.seed;
      b.dims = s.dims;
      b.rank = s.rank;
      b.noise_level = s.noise_level;
      b.timing = !no_time;
      b.base = decompose_options(s);
      const auto rows = bench(b);
      write_or_print(s.out, [&](std::ostream& os) { write_bench_csv(os, rows, b.timing); });
    }
  } catch (const DegenerateComponentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDegenerate;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
