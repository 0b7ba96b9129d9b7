#include <fstream>

#include "gdisp/experiments.hpp"
#include "gdisp/format.hpp"

namespace gdisp {

PlotKind plot_kind_from_string(const std::string& text) {
  if (text == "trajectory3d") return PlotKind::trajectory3d;
  if (text == "entropy") return PlotKind::entropy;
  if (text == "curvature") return PlotKind::curvature;
  throw ParseError("unknown plot kind '" + text + "'");
}

void emit_plot_series(const GeodesicTrace& trace, PlotKind kind, std::ostream& out) {
  if (trace.steps.empty()) throw InvalidParameter("cannot plot an empty trace");
  if (kind == PlotKind::trajectory3d) {
    out << "t,mu,sigma2,beta\n";
    for (const auto& r : trace.steps) {
      out << format_number(r.t) << ',' << format_number(r.theta.mu) << ','
          << format_number(r.theta.sigma2) << ',' << format_number(r.theta.beta) << '\n';
    }
    return;
  }
  const bool is_entropy = kind == PlotKind::entropy;
  const char* series = is_entropy ? "entropy" : "curvature";
  out << "t,series,value\n";
  for (const auto& r : trace.steps) {
    out << format_number(r.t) << ',' << series << ','
        << format_number(is_entropy ? r.entropy : r.curvature) << '\n';
  }
}

void emit_plot_series(const GeodesicTrace& trace, PlotKind kind, const std::filesystem::path& out) {
  std::ofstream file(out, std::ios::binary);
  if (!file) throw IoError("cannot open " + out.string());
  emit_plot_series(trace, kind, file);
  if (!file) throw IoError("write failed: " + out.string());
}

}  // namespace gdisp
