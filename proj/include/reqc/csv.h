#pragma once

#include <string>
#include <vector>

namespace reqc {

/// Six significant digits with '.' as the decimal separator, independent of locale.
std::string fmt_g6(double v);

/// Joins already-formatted cells with commas.
std::string csv_line(const std::vector<std::string>& cells);

}  // namespace reqc
