#pragma once

#include "orank/kruskal.hpp"
#include "orank/trace.hpp"

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace orank {

enum class TensorFormat { Text, Binary };

/// "text" or "binary"; InputError otherwise.
TensorFormat parse_tensor_format(std::string_view s);

/// Text: "tensor v1", "dims: I_1 ... I_N", then one value per line with 17
/// significant digits, first index fastest.
/// Binary: "OTNS", u32 N, N u64 dims, f64 values, all little-endian.
void write_tensor(std::ostream& os, const DenseTensor& a, TensorFormat fmt = TensorFormat::Text);
/// Detects the format from the first bytes. Throws InputError on malformed
/// input, wrong value counts or non-finite values.
DenseTensor read_tensor(std::istream& is);

void save_tensor(const std::filesystem::path& p, const DenseTensor& a, TensorFormat fmt = TensorFormat::Text);
DenseTensor load_tensor(const std::filesystem::path& p);

/// "kruskal v1", "dims: ...", "rank: R", optional "weights: ...", then for each
/// mode a "mode n:" line followed by I_n rows of R values.
void write_kruskal(std::ostream& os, const KruskalTensor& k);
KruskalTensor read_kruskal(std::istream& is);

void save_kruskal(const std::filesystem::path& p, const KruskalTensor& k);
KruskalTensor load_kruskal(const std::filesystem::path& p);

/// CSV with header k,theta,rel_change,inner_iters,rerr,seconds.
void write_trace_csv(std::ostream& os, const RunTrace& t);
void save_trace_csv(const std::filesystem::path& p, const RunTrace& t);

/// %.17g formatting used by every text writer.
std::string format_double(double v);

}  // namespace orank
