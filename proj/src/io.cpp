#include "orank/io.hpp"

#include "orank/errors.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace orank {

namespace {

constexpr std::array<char, 4> kMagic{'O', 'T', 'N', 'S'};

template <class T>
void put_le(std::ostream& os, T v) {
  std::array<unsigned char, sizeof(T)> b{};
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(v);
  } else {
    bits = static_cast<std::uint64_t>(v);
  }
  for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  std::array<unsigned char, sizeof(T)> b{};
  if (!is.read(reinterpret_cast<char*>(b.data()), sizeof(T))) {
    throw InputError("binary tensor: unexpected end of file");
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string next_line(std::istream& is, const char* what) {
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (!line.empty()) return line;
  }
  throw InputError(std::string("unexpected end of input while reading ") + what);
}

// "key: rest" -> rest, InputError if the key differs.
std::string expect_key(const std::string& line, std::string_view key) {
  if (line.size() < key.size() + 1 || line.compare(0, key.size(), key) != 0 || line[key.size()] != ':') {
    throw InputError("expected '" + std::string(key) + ":' but found '" + line + "'");
  }
  return line.substr(key.size() + 1);
}

double parse_double(std::string_view tok) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  const auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || p != end) throw InputError("not a number: '" + std::string(tok) + "'");
  if (!std::isfinite(v)) throw InputError("non-finite value in input");
  return v;
}

Index parse_index(std::string_view tok) {
  long long v = 0;
  const auto* end = tok.data() + tok.size();
  const auto [p, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || p != end) throw InputError("not an integer: '" + std::string(tok) + "'");
  return static_cast<Index>(v);
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::vector<Index> parse_dims(const std::string& rest) {
  std::vector<Index> dims;
  for (const auto& t : split(rest)) {
    const Index d = parse_index(t);
    if (d < 1) throw InputError("dimensions must be positive");
    dims.push_back(d);
  }
  if (dims.empty()) throw InputError("dims line is empty");
  return dims;
}

DenseTensor read_binary(std::istream& is) {
  const auto n = get_le<std::uint32_t>(is);
  if (n == 0 || n > 64) throw InputError("binary tensor: bad order");
  std::vector<Index> dims;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto d = get_le<std::uint64_t>(is);
    if (d == 0 || d > (std::uint64_t{1} << 40)) throw InputError("binary tensor: bad dimension");
    dims.push_back(static_cast<Index>(d));
  }
  DenseTensor a(dims);
  for (double& v : a.values()) {
    v = get_le<double>(is);
    if (!std::isfinite(v)) throw InputError("binary tensor: non-finite value");
  }
  if (is.peek() != std::char_traits<char>::eof()) throw InputError("binary tensor: trailing bytes");
  return a;
}

DenseTensor read_text(std::istream& is) {
  if (next_line(is, "header") != "tensor v1") throw InputError("text tensor: bad header");
  const auto dims = parse_dims(expect_key(next_line(is, "dims"), "dims"));
  DenseTensor a(dims);
  auto vals = a.values();
  std::size_t i = 0;
  std::string tok;
  while (is >> tok) {
    if (i == vals.size()) throw InputError("text tensor: more values than dims allow");
    vals[i++] = parse_double(tok);
  }
  if (i != vals.size()) throw InputError("text tensor: fewer values than dims require");
  return a;
}

template <class F>
void with_output(const std::filesystem::path& p, std::ios::openmode mode, F f) {
  std::ofstream os(p, mode);
  if (!os) throw InputError("cannot open '" + p.string() + "' for writing");
  f(os);
  if (!os) throw InputError("write to '" + p.string() + "' failed");
}

std::ifstream open_input(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw InputError("cannot open '" + p.string() + "'");
  return is;
}

}  // namespace

TensorFormat parse_tensor_format(std::string_view s) {
  if (s == "text") return TensorFormat::Text;
  if (s == "binary") return TensorFormat::Binary;
  throw InputError("unknown format '" + std::string(s) + "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_tensor(std::ostream& os, const DenseTensor& a, TensorFormat fmt) {
  if (fmt == TensorFormat::Binary) {
    os.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(a.order()));
    for (Index d : a.dims()) put_le<std::uint64_t>(os, static_cast<std::uint64_t>(d));
    for (double v : a.values()) put_le<double>(os, v);
    return;
  }
  os << "tensor v1\ndims:";
  for (Index d : a.dims()) os << ' ' << d;
  os << '\n';
  for (double v : a.values()) os << format_double(v) << '\n';
}

DenseTensor read_tensor(std::istream& is) {
  std::array<char, 4> head{};
  const auto start = is.tellg();
  if (is.read(head.data(), head.size()) && head == kMagic) return read_binary(is);
  is.clear();
  is.seekg(start);
  return read_text(is);
}

void save_tensor(const std::filesystem::path& p, const DenseTensor& a, TensorFormat fmt) {
  with_output(p, std::ios::binary, [&](std::ostream& os) { write_tensor(os, a, fmt); });
}

DenseTensor load_tensor(const std::filesystem::path& p) {
  auto is = open_input(p);
  return read_tensor(is);
}

void write_kruskal(std::ostream& os, const KruskalTensor& k) {
  k.validate();
  os << "kruskal v1\ndims:";
  for (Index d : k.dims()) os << ' ' << d;
  os << "\nrank: " << k.rank() << '\n';
  if (k.weights) {
    os << "weights:";
    for (Index r = 0; r < k.rank(); ++r) os << ' ' << format_double((*k.weights)(r));
    os << '\n';
  }
  for (Index n = 0; n < k.order(); ++n) {
    os << "mode " << n + 1 << ":\n";
    const auto& f = k.factors[static_cast<std::size_t>(n)];
    for (Index i = 0; i < f.rows(); ++i) {
      for (Index c = 0; c < f.cols(); ++c) os << (c ? " " : "") << format_double(f(i, c));
      os << '\n';
    }
  }
}

KruskalTensor read_kruskal(std::istream& is) {
  if (next_line(is, "header") != "kruskal v1") throw InputError("kruskal file: bad header");
  const auto dims = parse_dims(expect_key(next_line(is, "dims"), "dims"));
  const auto rank_tok = split(expect_key(next_line(is, "rank"), "rank"));
  if (rank_tok.size() != 1) throw InputError("kruskal file: bad rank line");
  const Index rank = parse_index(rank_tok.front());
  if (rank < 1) throw InputError("kruskal file: rank must be positive");

  std::optional<Vector> weights;
  std::string line = next_line(is, "mode block");
  if (line.rfind("weights:", 0) == 0) {
    const auto toks = split(expect_key(line, "weights"));
    if (static_cast<Index>(toks.size()) != rank) throw InputError("kruskal file: weight count differs from rank");
    Vector w(rank);
    for (Index r = 0; r < rank; ++r) w(r) = parse_double(toks[static_cast<std::size_t>(r)]);
    weights = std::move(w);
    line = next_line(is, "mode block");
  }

  std::vector<Matrix> factors;
  for (std::size_t n = 0; n < dims.size(); ++n) {
    if (n > 0) line = next_line(is, "mode block");
    if (line != "mode " + std::to_string(n + 1) + ":") {
      throw InputError("kruskal file: expected 'mode " + std::to_string(n + 1) + ":'");
    }
    Matrix f(dims[n], rank);
    for (Index i = 0; i < dims[n]; ++i) {
      const auto toks = split(next_line(is, "factor row"));
      if (static_cast<Index>(toks.size()) != rank) throw InputError("kruskal file: row length differs from rank");
      for (Index c = 0; c < rank; ++c) f(i, c) = parse_double(toks[static_cast<std::size_t>(c)]);
    }
    factors.push_back(std::move(f));
  }
  std::string extra;
  if (is >> extra) throw InputError("kruskal file: trailing content");
  return KruskalTensor(std::move(factors), std::move(weights));
}

void save_kruskal(const std::filesystem::path& p, const KruskalTensor& k) {
  with_output(p, std::ios::binary, [&](std::ostream& os) { write_kruskal(os, k); });
}

KruskalTensor load_kruskal(const std::filesystem::path& p) {
  auto is = open_input(p);
  return read_kruskal(is);
}

void write_trace_csv(std::ostream& os, const RunTrace& t) {
  os << "k,theta,rel_change,inner_iters,rerr,seconds\n";
  for (const auto& r : t.rows) {
    os << r.k << ',' << format_double(r.theta) << ',' << format_double(r.rel_change) << ','
       << r.inner_iters << ',' << format_double(r.rerr) << ',' << format_double(r.seconds) << '\n';
  }
}

void save_trace_csv(const std::filesystem::path& p, const RunTrace& t) {
  with_output(p, std::ios::binary, [&](std::ostream& os) { write_trace_csv(os, t); });
}

}  // namespace orank
