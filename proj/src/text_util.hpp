#pragma once

#include <charconv>
#include <string>

namespace ratiokit::detail {

// Shortest representation that round-trips.
inline std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// 17 significant digits, as written to data files.
inline std::string digits17(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace ratiokit::detail
