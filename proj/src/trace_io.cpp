#include "restart_agd/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace restart_agd {

namespace {

constexpr const char* kCsvHeader = "k,f_value,gap,grad_norm_y,restarted";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

double parse_double(const std::string& field, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end == field.c_str() || *end != '\0')
    throw IoError("malformed numeric field '" + field + "' in " + path);
  return v;
}

}  // namespace

void write_csv(const RunTrace& trace, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& rec : trace.records) {
    os << rec.k << ',' << fmt17(rec.f_value) << ',';
    if (rec.gap) os << fmt17(*rec.gap);
    os << ',' << fmt17(rec.grad_norm_y) << ',' << (rec.restarted ? 1 : 0) << '\n';
  }
}

void write_csv(const RunTrace& trace, const std::string& path) {
  auto os = open_out(path);
  write_csv(trace, os);
  if (!os) throw IoError("write failed: " + path);
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw IoError("bad trace CSV header in " + path);
  std::vector<CsvRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 5) throw IoError("bad trace CSV row in " + path);
    CsvRow row;
    row.k = static_cast<int>(parse_double(fields[0], path));
    row.f_value = parse_double(fields[1], path);
    if (!fields[2].empty()) row.gap = parse_double(fields[2], path);
    row.grad_norm_y = parse_double(fields[3], path);
    row.restarted = parse_double(fields[4], path) != 0.0;
    rows.push_back(row);
  }
  return rows;
}

namespace {

constexpr double kGapFloor = 1e-16;
constexpr int kWidth = 840;
constexpr int kHeight = 560;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 170;
constexpr int kMarginTop = 24;
constexpr int kMarginBottom = 52;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                          "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

void render_svg(const std::vector<NamedTrace>& traces, std::ostream& os) {
  if (traces.empty()) throw std::invalid_argument("render_svg: no traces");

  struct Series {
    std::string label;
    std::vector<std::pair<int, double>> points;  // (k, log10 clamped gap)
  };
  std::vector<Series> series;
  int max_k = 1;
  double lo = 0.0, hi = 0.0;
  bool have_range = false;
  for (const auto& nt : traces) {
    if (nt.trace == nullptr) throw std::invalid_argument("render_svg: null trace");
    Series s;
    s.label = nt.label;
    for (const auto& rec : nt.trace->records) {
      if (!rec.gap) continue;
      const double ly = std::log10(std::max(*rec.gap, kGapFloor));
      s.points.emplace_back(rec.k, ly);
      if (!have_range) {
        lo = hi = ly;
        have_range = true;
      } else {
        lo = std::min(lo, ly);
        hi = std::max(hi, ly);
      }
      max_k = std::max(max_k, rec.k);
    }
    if (s.points.empty())
      throw std::invalid_argument("render_svg: trace '" + nt.label + "' has no gap values");
    series.push_back(std::move(s));
  }
  if (hi - lo < 1e-9) {
    lo -= 0.5;
    hi += 0.5;
  }

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  const auto px = [&](double k) { return kMarginLeft + k / max_k * plot_w; };
  const auto py = [&](double ly) { return kMarginTop + (hi - ly) / (hi - lo) * plot_h; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
     << "\">\n";
  os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"white\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

  // axes
  os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
     << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
     << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
     << "\" stroke=\"black\"/>\n";

  // x ticks
  for (int i = 0; i <= 4; ++i) {
    const double k = max_k * (i / 4.0);
    const double x = px(k);
    os << "<line x1=\"" << fmt_coord(x) << "\" y1=\"" << kMarginTop + plot_h
       << "\" x2=\"" << fmt_coord(x) << "\" y2=\"" << kMarginTop + plot_h + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt_coord(x) << "\" y=\"" << kMarginTop + plot_h + 20
       << "\" text-anchor=\"middle\">" << fmt_tick(std::round(k)) << "</text>\n";
  }
  os << "<text x=\"" << fmt_coord(kMarginLeft + plot_w / 2) << "\" y=\""
     << kHeight - 12 << "\" text-anchor=\"middle\">iteration</text>\n";

  // y ticks at integer exponents
  const int y_lo = static_cast<int>(std::ceil(lo));
  const int y_hi = static_cast<int>(std::floor(hi));
  const int y_step = std::max(1, (y_hi - y_lo + 6) / 7);
  for (int e = y_lo; e <= y_hi; e += y_step) {
    const double y = py(e);
    os << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << fmt_coord(y)
       << "\" x2=\"" << kMarginLeft << "\" y2=\"" << fmt_coord(y)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kMarginLeft - 9 << "\" y=\"" << fmt_coord(y + 4)
       << "\" text-anchor=\"end\">" << e << "</text>\n";
  }
  os << "<text x=\"16\" y=\"" << fmt_coord(kMarginTop + plot_h / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fmt_coord(kMarginTop + plot_h / 2) << ")\">log10(gap)</text>\n";

  // polylines
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [k, ly] : series[i].points)
      os << fmt_coord(px(k)) << ',' << fmt_coord(py(ly)) << ' ';
    os << "\"/>\n";
  }

  // legend
  const double legend_x = kMarginLeft + plot_w + 16;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    const double y = kMarginTop + 14 + 20.0 * static_cast<double>(i);
    os << "<line x1=\"" << fmt_coord(legend_x) << "\" y1=\"" << fmt_coord(y)
       << "\" x2=\"" << fmt_coord(legend_x + 24) << "\" y2=\"" << fmt_coord(y)
       << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << fmt_coord(legend_x + 30) << "\" y=\"" << fmt_coord(y + 4)
       << "\">" << series[i].label << "</text>\n";
  }

  os << "</g>\n</svg>\n";
}

void render_svg(const std::vector<NamedTrace>& traces, const std::string& path) {
  std::ostringstream buf;
  render_svg(traces, buf);  // validate before touching the file
  auto os = open_out(path);
  os << buf.str();
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace restart_agd
