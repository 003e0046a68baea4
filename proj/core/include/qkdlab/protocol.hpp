#pragma once

// Session drivers for the EPR scheme and for BB84 with an asymmetric basis
// choice, plus the test-sample acceptance logic shared by both.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qkdlab/adversary.hpp"
#include "qkdlab/channel.hpp"
#include "qkdlab/postprocess.hpp"
#include "qkdlab/public_channel.hpp"
#include "qkdlab/rng.hpp"
#include "qkdlab/types.hpp"

namespace qkdlab {

enum class Protocol : std::uint8_t { epr, bb84 };
enum class ThresholdMode : std::uint8_t { window, two_epsilon };
enum class Verdict : std::uint8_t { accepted, rejected };

std::string_view to_string(Protocol protocol) noexcept;
std::string_view to_string(ThresholdMode mode) noexcept;
std::string_view to_string(Verdict verdict) noexcept;

struct SessionConfig {
  std::size_t n = 0;
  /// EPR: number of test pairs. BB84: total test positions, m/2 drawn from
  /// the diagonal-matched positions and the rest from the rectilinear ones.
  std::size_t m = 0;
  double epsilon = 0.0;
  double c = 1.0;
  double omega = 0.5;
  ThresholdMode threshold_mode = ThresholdMode::window;
  std::uint64_t seed = 0;

  /// 0 < m <= N, 0 <= epsilon < 1, c > 0, 0 <= omega <= 1. Throws ConfigError.
  void validate() const;

  /// min(N, ceil(10 sqrt(N)))
  static std::size_t default_epr_m(std::size_t n);
  /// N omega^2 rounded down to an even count, at least 2 (capped at N).
  static std::size_t default_bb84_m(std::size_t n, double omega);
};

/// [ceil((eps - c eps^2) m), floor((eps + c eps^2) m)], lo clamped at 0.
/// epsilon = 0 gives [0, 0]. Throws ConfigError when the window is empty.
AcceptanceRange acceptance_window(double epsilon, double c, std::size_t m);

/// Error counts accepted under the config's threshold mode for `tested`
/// positions. two_epsilon accepts errors / tested < 2 epsilon.
AcceptanceRange acceptance_range(const SessionConfig& config, std::size_t tested);

Verdict decide(AcceptanceRange range, std::size_t errors) noexcept;

/// Uniform m-subset of [0, N), sorted. Throws ConfigError for m = 0 or m > N.
std::vector<std::size_t> select_test_set(std::size_t n, std::size_t m, Rng& rng);

struct PositionRecord {
  std::size_t index = 0;
  MeasurementAxis axis_a = MeasurementAxis::z_axis();
  MeasurementAxis axis_b = MeasurementAxis::z_axis();
  /// Raw outcomes: spin for EPR, prepared and measured bit for BB84.
  std::uint8_t outcome_a = 0;
  std::uint8_t outcome_b = 0;
  bool in_test = false;
  bool sifted = false;
};

struct TranscriptData {
  Protocol protocol = Protocol::epr;
  std::vector<PositionRecord> records;
  std::vector<std::size_t> test_indices;
  AcceptanceRange accept;
  std::size_t error_count = 0;
  Verdict verdict = Verdict::rejected;
  BitString key_a;
  BitString key_b;
  std::vector<SessionEvent> trace;
  /// S(rho_R) for a coherent attack that passed the test.
  std::optional<double> eve_holevo_bits;
};

/// Immutable record of one session. The constructor checks that test and key
/// positions are disjoint and that the verdict follows from the error count.
class Transcript {
 public:
  explicit Transcript(TranscriptData data);

  Protocol protocol() const noexcept { return data_.protocol; }
  std::span<const PositionRecord> records() const noexcept { return data_.records; }
  std::span<const std::size_t> test_indices() const noexcept { return data_.test_indices; }
  AcceptanceRange accept() const noexcept { return data_.accept; }
  std::size_t error_count() const noexcept { return data_.error_count; }
  std::size_t tested() const noexcept { return data_.test_indices.size(); }
  Verdict verdict() const noexcept { return data_.verdict; }
  bool accepted() const noexcept { return data_.verdict == Verdict::accepted; }
  const BitString& key_a() const noexcept { return data_.key_a; }
  const BitString& key_b() const noexcept { return data_.key_b; }
  std::span<const SessionEvent> trace() const noexcept { return data_.trace; }
  std::optional<double> eve_holevo_bits() const noexcept { return data_.eve_holevo_bits; }

  std::size_t n() const noexcept { return data_.records.size(); }
  std::size_t sifted_count() const noexcept { return sifted_; }
  double sifted_fraction() const noexcept;
  /// error_count / tested
  ErrorEstimate error_estimate() const;
  RawKeyPair raw_key() const;

 private:
  TranscriptData data_;
  std::size_t sifted_ = 0;
};

/// One JSON object per position: index, basis_a, basis_b, outcome_a,
/// outcome_b, in_test, sifted. EPR bases are written as [x, y, z] axes and
/// BB84 bases by name.
void write_jsonl(std::ostream& out, const Transcript& transcript);

Transcript run_epr_session(const SessionConfig& config, const ChannelModel& channel,
                           Eavesdropper& eve, Rng& rng);
Transcript run_epr_session(const SessionConfig& config, const ChannelModel& channel,
                           const AttackSpec& attack, Rng& rng);

/// Direct polarization BB84: Alice prepares each photon herself.
Transcript run_bb84_session(const SessionConfig& config, const ChannelModel& channel,
                            Eavesdropper& eve, Rng& rng);
Transcript run_bb84_session(const SessionConfig& config, const ChannelModel& channel,
                            const AttackSpec& attack, Rng& rng);

enum class AliceTiming : std::uint8_t { before_transmission, after_transmission };

/// BB84 built from EPR pairs: Alice measures her member in her chosen basis,
/// either before Bob's member leaves or after he acknowledges delivery.
Transcript run_bb84_epr_session(const SessionConfig& config, const ChannelModel& channel,
                                AliceTiming timing, Eavesdropper& eve, Rng& rng);

struct EquivalenceCell {
  Basis basis_a;
  Basis basis_b;
  std::uint8_t bit_a;
  std::uint8_t bit_b;
  /// Frequencies for direct preparation, EPR measured before transmission,
  /// and EPR measured after acknowledgment.
  std::array<double, 3> frequency{};
  /// Largest pairwise |p_i - p_j| / sigma_pooled; 0 when both are 0.
  double max_z = 0.0;
};

struct EquivalenceReport {
  std::array<EquivalenceCell, 16> cells{};
  std::array<double, 3> sifted_qber{};
  std::size_t positions = 0;
  bool agree = false;  // every cell within 3 sigma for every pair of variants
};

/// Runs the three constructions on config.n positions each (no attack) and
/// compares the joint (basis, bit) distributions cell by cell.
EquivalenceReport epr_bb84_equivalence_check(const SessionConfig& config, const ChannelModel& channel,
                                             Rng& rng);

}  // namespace qkdlab
