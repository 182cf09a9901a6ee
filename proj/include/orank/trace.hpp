#pragma once

#include <vector>

namespace orank {

/// One outer iteration (or ALS sweep) of a fit.
struct TraceRow {
  int k = 0;
  double theta = 0.0;
  double rel_change = 0.0;
  int inner_iters = 0;
  double rerr = 0.0;
  double seconds = 0.0;  // cumulative wall time since the fit started
};

struct RunTrace {
  std::vector<TraceRow> rows;

  bool empty() const noexcept { return rows.empty(); }
  std::size_t size() const noexcept { return rows.size(); }
  const TraceRow& back() const { return rows.back(); }
};

}  // namespace orank
