#pragma once

#include <string>

namespace gdisp {

/// Locale-independent shortest round-trip decimal rendering of a double.
std::string format_number(double value);

/// Locale-independent parse; throws ParseError on trailing garbage.
double parse_number(const std::string& text);

}  // namespace gdisp
