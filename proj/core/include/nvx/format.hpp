// Locale-free number formatting; shortest round-trip decimals so emitted
// files are byte-identical across runs and worker counts.
#pragma once

#include <charconv>
#include <string>

namespace nvx {

inline std::string fmt(double v) {
  if (v == 0.0) return "0";  // normalize -0
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string fmt(int v) { return std::to_string(v); }

}  // namespace nvx
