#pragma once

// Classical distillation: error estimation, parity-bisection reconciliation
// and Toeplitz privacy amplification.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "qkdlab/channel.hpp"
#include "qkdlab/rng.hpp"
#include "qkdlab/types.hpp"

namespace qkdlab {

struct ErrorEstimate {
  double value = 0.0;
  /// 3 sqrt(value (1 - value) / m)
  double half_width = 0.0;
  std::size_t errors = 0;
  std::size_t tested = 0;

  ErrorRate rate() const { return ErrorRate(value); }
};

/// Rejects m = 0.
ErrorEstimate estimate_error_rate(std::size_t errors, std::size_t tested);
/// One flag per tested position, true for an error.
ErrorEstimate estimate_error_rate(std::span<const bool> test_errors);

struct RawKeyPair {
  BitString key_a;
  BitString key_b;
  ErrorRate estimated_error{0.0};
  std::size_t leaked_bits = 0;

  /// Rejects keys of different length.
  void validate() const;
};

struct ReconcileOptions {
  /// Sizes the first block as max(4, ceil(0.73 / hint)); 16 when unset.
  std::optional<double> error_hint;
  std::size_t max_passes = 64;
};

struct ReconcileResult {
  BitString corrected_b;
  /// Every parity Alice disclosed, block and bisection alike.
  std::size_t leaked_bits = 0;
  std::size_t passes = 0;
  std::size_t corrections = 0;
};

/// Rounds of: shuffle, compare block parities, bisect mismatched blocks and
/// flip the located bit in Bob's copy. Stops after two consecutive passes
/// without a mismatch or after max_passes.
ReconcileResult reconcile(const BitString& key_a, const BitString& key_b, Rng& rng,
                          const ReconcileOptions& options = {});

/// Toeplitz hash of `key` to `output_length` bits. The matrix diagonals come
/// from Rng(hash_seed). Rejects output_length > key.size().
BitString privacy_amplify(const BitString& key, std::size_t output_length, std::uint64_t hash_seed);

/// floor(n_raw max(0, 1 + k' eps log2 eps)) - leaked, clamped at 0.
/// Throws RegimeError outside 0 <= eps < 1/4.
std::size_t final_key_length(std::size_t n_raw, ErrorRate epsilon, std::size_t leaked_bits,
                             double kprime);

struct DistilledKey {
  BitString final_a;
  BitString final_b;
  std::size_t leaked_bits = 0;
  std::size_t final_length = 0;
  std::uint64_t hash_seed = 0;
  ReconcileResult reconciliation;
};

/// reconcile, size with final_key_length at the estimated error, then hash
/// both sides with a seed drawn from `rng`.
DistilledKey distill(const RawKeyPair& raw, double kprime, Rng& rng);

}  // namespace qkdlab
