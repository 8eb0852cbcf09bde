#pragma once

#include <charconv>
#include <string>

namespace bews {

/// Shortest round-trip decimal representation; all file output goes through
/// this so reruns are byte-identical.
inline std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

}  // namespace bews
