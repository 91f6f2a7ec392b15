#pragma once

#include <charconv>
#include <string>

namespace nmpa {

// Shortest representation that round-trips the exact double, so repeated runs
// emit byte-identical files.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace nmpa
