#pragma once

// Number formatting shared by every CSV writer: scientific notation with 12
// significant digits and '.' as the decimal separator.

#include <cstdio>
#include <string>

namespace qmep {

inline constexpr const char* csv_schema_line = "# schema=1";

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

}  // namespace qmep
