#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "restart_agd/engine.hpp"

namespace restart_agd {

// Raised when a file cannot be opened, read, or written; the message names the path.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One parsed row of a trace CSV.
struct CsvRow {
  int k = 0;
  double f_value = 0.0;
  std::optional<double> gap;
  double grad_norm_y = 0.0;
  bool restarted = false;
};

// Header `k,f_value,gap,grad_norm_y,restarted`, one row per iteration,
// doubles printed with 17 significant digits, gap left empty when unknown.
void write_csv(const RunTrace& trace, std::ostream& os);
void write_csv(const RunTrace& trace, const std::string& path);

std::vector<CsvRow> read_csv(const std::string& path);

struct NamedTrace {
  std::string label;
  const RunTrace* trace = nullptr;
};

// Self-contained SVG: log10(gap) against iteration, one polyline per trace
// plus a legend. Gaps are clamped below at 1e-16 for plotting.
void render_svg(const std::vector<NamedTrace>& traces, std::ostream& os);
void render_svg(const std::vector<NamedTrace>& traces, const std::string& path);

}  // namespace restart_agd
