#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace banzkp {

using Bytes = std::vector<uint8_t>;

inline void put_u16be(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v & 0xff));
}

inline uint16_t get_u16be(const uint8_t* p) {
  return static_cast<uint16_t>((p[0] << 8) | p[1]);
}

inline void append(Bytes& out, const Bytes& more) {
  out.insert(out.end(), more.begin(), more.end());
}

inline std::string to_hex(const Bytes& b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(b.size() * 2);
  for (uint8_t c : b) {
    s.push_back(digits[c >> 4]);
    s.push_back(digits[c & 0x0f]);
  }
  return s;
}

/// True if `needle` occurs as a contiguous substring of `haystack`.
bool contains(const Bytes& haystack, const Bytes& needle);

}  // namespace banzkp
