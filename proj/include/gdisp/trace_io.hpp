#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "gdisp/geodesic.hpp"

namespace gdisp {

inline constexpr std::string_view kTraceHeader =
    "t,mu,sigma2,beta,alpha1,alpha2,alpha3,entropy,curvature,arc_length,metric_length";

void write_trace_csv(const GeodesicTrace& trace, std::ostream& out);
void write_trace_csv(const GeodesicTrace& trace, const std::filesystem::path& path);

/// Reads a trace written by write_trace_csv. Mode and termination status are
/// not stored in the CSV and come back as defaults.
GeodesicTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace gdisp
