#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace eniac {

/// Shortest round-trip text for a double; independent of the C++ locale.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace eniac
