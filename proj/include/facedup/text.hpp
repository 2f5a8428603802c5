#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace facedup::text {

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      return out;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

/// Parses a finite or non-finite double; returns false on trailing garbage.
bool parse_double(std::string_view s, double& out);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

std::string to_hex(const std::uint8_t* data, std::size_t n);
std::string to_hex64(std::uint64_t v);
bool from_hex64(std::string_view s, std::uint64_t& out);
bool from_hex(std::string_view s, std::uint8_t* out, std::size_t n);

}  // namespace facedup::text
