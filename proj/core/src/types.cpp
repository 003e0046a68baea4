#include "qkdlab/types.hpp"

#include <stdexcept>

namespace qkdlab {

std::string_view to_string(Basis basis) noexcept {
  return basis == Basis::rectilinear ? "rectilinear" : "diagonal";
}

std::string to_hex(const BitString& bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 7) / 8 * 2);
  for (std::size_t byte = 0; byte * 8 < bits.size(); ++byte) {
    unsigned value = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      const std::size_t i = byte * 8 + k;
      value = (value << 1) | (i < bits.size() ? (bits[i] & 1u) : 0u);
    }
    out.push_back(kDigits[value >> 4]);
    out.push_back(kDigits[value & 0xF]);
  }
  return out;
}

std::size_t hamming_distance(const BitString& a, const BitString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

}  // namespace qkdlab
