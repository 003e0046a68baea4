#include "qkdlab/postprocess.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qkdlab/bounds.hpp"
#include "qkdlab/errors.hpp"

namespace qkdlab {

namespace {

using Words = std::vector<std::uint64_t>;

Words pack(const BitString& bits, std::size_t offset, std::size_t length) {
  Words words((length + 63) / 64, 0);
  for (std::size_t i = 0; i < length; ++i)
    if (bits[offset + i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
  return words;
}

}  // namespace

ErrorEstimate estimate_error_rate(std::size_t errors, std::size_t tested) {
  if (tested == 0) throw ConfigError("m", "cannot estimate an error rate from zero tested positions");
  if (errors > tested) throw std::invalid_argument("error count exceeds tested positions");
  ErrorEstimate e;
  e.errors = errors;
  e.tested = tested;
  e.value = static_cast<double>(errors) / static_cast<double>(tested);
  e.half_width = 3.0 * std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(tested));
  return e;
}

ErrorEstimate estimate_error_rate(std::span<const bool> test_errors) {
  return estimate_error_rate(
      static_cast<std::size_t>(std::count(test_errors.begin(), test_errors.end(), true)),
      test_errors.size());
}

void RawKeyPair::validate() const {
  if (key_a.size() != key_b.size()) throw std::invalid_argument("raw keys differ in length");
}

ReconcileResult reconcile(const BitString& key_a, const BitString& key_b, Rng& rng,
                          const ReconcileOptions& options) {
  if (key_a.size() != key_b.size()) throw std::invalid_argument("reconcile: keys differ in length");
  const std::size_t n = key_a.size();
  ReconcileResult out;
  out.corrected_b = key_b;
  if (n == 0) return out;
  BitString& b = out.corrected_b;

  std::size_t first_block = 16;
  if (options.error_hint && *options.error_hint > 0.0)
    first_block = std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(0.73 / *options.error_hint)));

  std::size_t clean_passes = 0;
  for (std::size_t pass = 0; pass < options.max_passes && clean_passes < 2; ++pass) {
    const std::size_t block = std::min(n, first_block << std::min<std::size_t>(pass, 2));
    const auto perm = random_permutation(n, rng);
    const auto parity = [&](const BitString& key, std::size_t lo, std::size_t hi) {
      std::uint8_t p = 0;
      for (std::size_t i = lo; i < hi; ++i) p ^= key[perm[i]];
      return p;
    };

    bool mismatch = false;
    for (std::size_t lo = 0; lo < n; lo += block) {
      std::size_t hi = std::min(n, lo + block);
      ++out.leaked_bits;
      if (parity(key_a, lo, hi) == parity(b, lo, hi)) continue;
      mismatch = true;
      while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        ++out.leaked_bits;
        if (parity(key_a, lo, mid) != parity(b, lo, mid))
          hi = mid;
        else
          lo = mid;
      }
      b[perm[lo]] ^= 1;
      ++out.corrections;
    }
    ++out.passes;
    clean_passes = mismatch ? 0 : clean_passes + 1;
  }
  return out;
}

BitString privacy_amplify(const BitString& key, std::size_t output_length, std::uint64_t hash_seed) {
  const std::size_t n = key.size();
  if (output_length > n) throw std::invalid_argument("privacy_amplify: output longer than input");
  BitString out(output_length, 0);
  if (output_length == 0) return out;

  // T[i][j] = r[i - j + n - 1]; out_i = parity(r[i .. i+n) & reversed key).
  const std::size_t r_len = output_length + n - 1;
  Rng rng(hash_seed);
  Words r((r_len + 63) / 64 + 1, 0);
  for (std::size_t w = 0; w * 64 < r_len; ++w) r[w] = rng();
  if (r_len % 64) r[r_len / 64] &= (std::uint64_t{1} << (r_len % 64)) - 1;

  BitString reversed(key.rbegin(), key.rend());
  const Words k = pack(reversed, 0, n);
  const std::size_t kw = k.size();

  // shifted[s][w] holds bits 64w + s .. 64w + s + 63 of r.
  std::vector<Words> shifted(64, Words(r.size(), 0));
  for (std::size_t s = 0; s < 64; ++s)
    for (std::size_t w = 0; w + 1 < r.size(); ++w)
      shifted[s][w] = s == 0 ? r[w] : (r[w] >> s) | (r[w + 1] << (64 - s));

  for (std::size_t i = 0; i < output_length; ++i) {
    const Words& row = shifted[i % 64];
    const std::size_t base = i / 64;
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < kw; ++w) acc ^= row[base + w] & k[w];
    out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

std::size_t final_key_length(std::size_t n_raw, ErrorRate epsilon, std::size_t leaked_bits,
                             double kprime) {
  const double rate = secrecy_lower_bound(epsilon.value(), kprime);
  const auto secure = static_cast<std::size_t>(std::floor(static_cast<double>(n_raw) * rate));
  return secure > leaked_bits ? secure - leaked_bits : 0;
}

DistilledKey distill(const RawKeyPair& raw, double kprime, Rng& rng) {
  raw.validate();
  DistilledKey out;
  ReconcileOptions options;
  if (raw.estimated_error.value() > 0.0) options.error_hint = raw.estimated_error.value();
  out.reconciliation = reconcile(raw.key_a, raw.key_b, rng, options);
  out.leaked_bits = raw.leaked_bits + out.reconciliation.leaked_bits;
  out.final_length = final_key_length(raw.key_a.size(), raw.estimated_error, out.leaked_bits, kprime);
  out.hash_seed = rng();
  out.final_a = privacy_amplify(raw.key_a, out.final_length, out.hash_seed);
  out.final_b = privacy_amplify(out.reconciliation.corrected_b, out.final_length, out.hash_seed);
  return out;
}

}  // namespace qkdlab
