#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace ssf {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return std::signbit(x) ? "-0" : "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) return std::to_string(x);
  return {buf, res.ptr};
}

}  // namespace ssf
