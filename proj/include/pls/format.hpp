#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace pls {

/// Formats a double with 17 significant digits, locale independent.
/// The result parses back to the identical bit pattern.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, ptr);
}

/// FNV-1a over a byte string; used to fingerprint configurations.
inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace pls
