#pragma once

#include <cstdio>
#include <string>

namespace emgfit {

/// Formats with `digits` significant digits ("%.*g"); the serialization
/// precision used by every exported number.
inline std::string format_sig(double x, int digits = 12) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// Rounds through the decimal representation so serialized and in-memory
/// values agree bit for bit.
inline double round_sig(double x, int digits = 12) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

}  // namespace emgfit
