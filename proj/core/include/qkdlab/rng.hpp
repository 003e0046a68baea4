#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace qkdlab {

/// Philox4x32-10 block function. Maps a 128-bit counter and a 64-bit key to
/// 128 pseudorandom bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

/// SplitMix64 finalizer; used to derive stream identifiers.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based random stream.
///
/// The seed is the Philox key. Counter words 2..3 hold the stream id and
/// words 0..1 the block index, so any (seed, stream) pair addresses an
/// independent, reproducible sequence. Each block yields two 64-bit outputs.
/// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Unbiased integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept;

  /// Independent child stream; the parent is not advanced.
  Rng split(std::uint64_t substream) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// Stream for trial `trial` of a scenario seeded with `seed`.
inline Rng trial_stream(std::uint64_t seed, std::uint64_t trial) noexcept {
  return Rng(seed, mix64(trial + 0x51ed2701u));
}

/// Uniform m-subset of {0, ..., n-1} without replacement, sorted ascending.
/// Partial Fisher-Yates; requires m <= n.
std::vector<std::size_t> random_subset(std::size_t n, std::size_t m, Rng& rng);

/// Uniform random permutation of {0, ..., n-1}.
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace qkdlab
