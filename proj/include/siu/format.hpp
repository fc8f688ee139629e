#pragma once

#include <cstdio>
#include <string>

namespace siu {

// 17 significant digits: every double round-trips through text.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace siu
