#include "gdisp/trace_io.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gdisp/format.hpp"

namespace gdisp {

void write_trace_csv(const GeodesicTrace& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.steps) {
    const double cols[] = {r.t,        r.theta.mu, r.theta.sigma2, r.theta.beta,
                           r.alpha.a1, r.alpha.a2, r.alpha.a3,     r.entropy,
                           r.curvature, r.arc_length, r.metric_length};
    bool first = true;
    for (double c : cols) {
      if (!first) out << ',';
      out << format_number(c);
      first = false;
    }
    out << '\n';
  }
}

void write_trace_csv(const GeodesicTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace_csv(trace, out);
  if (!out) throw IoError("write failed: " + path.string());
}

GeodesicTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw ParseError(path.string() + ": missing or unexpected trace header");
  }
  GeodesicTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(parse_number(cell));
    if (cols.size() != 11) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 11 columns");
    }
    trace.steps.push_back({cols[0], {cols[1], cols[2], cols[3]}, {cols[4], cols[5], cols[6]},
                           cols[7], cols[8], cols[9], cols[10]});
  }
  if (!trace.steps.empty()) {
    trace.total_length = trace.steps.back().arc_length;
    trace.total_metric_length = trace.steps.back().metric_length;
  }
  return trace;
}

}  // namespace gdisp
