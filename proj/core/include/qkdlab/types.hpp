#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qkdlab {

/// Projective spin outcome. up is 0, down is 1.
enum class Spin : std::uint8_t { up = 0, down = 1 };

/// Polarization basis for BB84. Rectilinear is the z axis, diagonal the x axis.
enum class Basis : std::uint8_t { rectilinear = 0, diagonal = 1 };

std::string_view to_string(Basis basis) noexcept;

/// Index into the Bell basis: 0 is the singlet, 1..3 the other three states.
using BellLabel = std::uint8_t;

/// One bit per element, each 0 or 1.
using BitString = std::vector<std::uint8_t>;

/// Lowercase hex, most significant bit first within each byte, zero padded.
std::string to_hex(const BitString& bits);

std::size_t hamming_distance(const BitString& a, const BitString& b);

/// Inclusive range of tolerated error counts in a test sample.
struct AcceptanceRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  bool contains(std::int64_t errors) const noexcept { return errors >= lo && errors <= hi; }

  /// Every tested pair must come out antiparallel.
  static constexpr AcceptanceRange strict() noexcept { return {0, 0}; }
};

}  // namespace qkdlab
