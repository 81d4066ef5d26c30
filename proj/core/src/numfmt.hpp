#pragma once

#include <array>
#include <charconv>
#include <string>

namespace ioshock::detail {

/// Shortest decimal that parses back to the same double.
inline std::string format_shortest(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string out(buf.data(), res.ptr);
  if (out == "-0") out = "0";
  return out;
}

/// Fixed notation with `decimals` places; negative zero prints as zero.
inline std::string format_fixed(double v, int decimals) {
  std::array<char, 512> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed,
                           decimals);
  std::string out(buf.data(), res.ptr);
  if (!out.empty() && out[0] == '-' && out.find_first_not_of("-0.") == std::string::npos) {
    out.erase(0, 1);
  }
  return out;
}

}  // namespace ioshock::detail
