#pragma once

#include <cstdio>
#include <string>

namespace huntkit::detail {

// Round-trip decimal form used in every CSV and text output.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace huntkit::detail
