// Small shared helpers: float-to-index flooring that tolerates representation
// error, and round-trip double formatting for CSV output.

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

namespace bidcraft {

// floor() with a tiny upward nudge so products like 3 * (2.0 / 3.0) land on
// the intended integer instead of one below it.
inline std::int64_t nudged_floor(double x) {
  return static_cast<std::int64_t>(std::floor(x + 1e-9));
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace bidcraft
