#include "qkdlab/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "qkdlab/errors.hpp"

namespace qkdlab {

namespace {

constexpr double kRoundingGuard = 1e-9;

// Substreams of a session's randomness.
enum Stream : std::uint64_t { source = 1, eavesdropper, alice, bob, measurement, sampling };

// Per-position data after both parties have measured, before sifting.
struct Bb84Raw {
  std::vector<Basis> basis_a, basis_b;
  BitString bit_a, bit_b;
};

std::int64_t to_count(double x) { return static_cast<std::int64_t>(x); }

Transcript finish_bb84(const SessionConfig& config, const Bb84Raw& raw, PublicChannel& board,
                       Rng& sampling_rng) {
  const std::size_t n = config.n;
  std::vector<std::size_t> diagonal, rectilinear;
  for (std::size_t i = 0; i < n; ++i) {
    if (raw.basis_a[i] != raw.basis_b[i]) continue;
    (raw.basis_a[i] == Basis::diagonal ? diagonal : rectilinear).push_back(i);
  }
  const std::size_t m_diagonal = config.m / 2;
  const std::size_t m_rectilinear = config.m - m_diagonal;
  if (diagonal.size() < m_diagonal || rectilinear.size() < m_rectilinear)
    throw UndersamplingError("bb84: " + std::to_string(diagonal.size()) + " diagonal and " +
                             std::to_string(rectilinear.size()) +
                             " rectilinear matched positions cannot supply tests of " +
                             std::to_string(m_diagonal) + " and " + std::to_string(m_rectilinear));

  std::vector<std::size_t> tests;
  for (auto k : random_subset(diagonal.size(), m_diagonal, sampling_rng)) tests.push_back(diagonal[k]);
  for (auto k : random_subset(rectilinear.size(), m_rectilinear, sampling_rng))
    tests.push_back(rectilinear[k]);
  std::sort(tests.begin(), tests.end());
  board.announce_test_positions(tests);

  TranscriptData data;
  data.protocol = Protocol::bb84;
  data.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = data.records[i];
    r.index = i;
    r.axis_a = MeasurementAxis::for_basis(raw.basis_a[i]);
    r.axis_b = MeasurementAxis::for_basis(raw.basis_b[i]);
    r.outcome_a = raw.bit_a[i];
    r.outcome_b = raw.bit_b[i];
    r.sifted = raw.basis_a[i] == raw.basis_b[i];
  }
  for (auto t : tests) {
    data.records[t].in_test = true;
    data.error_count += raw.bit_a[t] != raw.bit_b[t];
  }
  for (const auto& r : data.records) {
    if (!r.sifted || r.in_test) continue;
    data.key_a.push_back(r.outcome_a);
    data.key_b.push_back(r.outcome_b);
  }
  data.accept = acceptance_range(config, tests.size());
  data.verdict = decide(data.accept, data.error_count);
  board.announce_verdict();
  data.test_indices = std::move(tests);
  data.trace.assign(board.trace().begin(), board.trace().end());
  return Transcript(std::move(data));
}

Basis draw_basis(double omega, Rng& rng) {
  return rng.bernoulli(omega) ? Basis::diagonal : Basis::rectilinear;
}

std::uint8_t flip(Spin s) { return s == Spin::up ? 1 : 0; }

Transcript run_coherent_epr(const SessionConfig& config, const CoherentAttack& attack, Rng& rng) {
  const std::size_t n = config.n;
  if (attack.n_pairs() != n)
    throw ConfigError("n", "coherent attack prepares " + std::to_string(attack.n_pairs()) +
                               " pairs but the session has " + std::to_string(n));
  PublicChannel board(n);
  for (std::size_t i = 0; i < n; ++i) board.deliver(i);
  board.acknowledge();

  Rng alice_rng = rng.split(Stream::alice);
  std::vector<MeasurementAxis> axes;
  axes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) axes.push_back(MeasurementAxis::random(alice_rng));
  board.announce_bases(axes, axes);

  Rng measure_rng = rng.split(Stream::measurement);
  QuantumState state = attack.joint_state();
  TranscriptData data;
  data.protocol = Protocol::epr;
  data.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    PairMeasurement result = measure_pair(state, PairSlot::of_pair(i), axes[i], axes[i], measure_rng);
    auto& r = data.records[i];
    r.index = i;
    r.axis_a = r.axis_b = axes[i];
    r.outcome_a = static_cast<std::uint8_t>(result.outcome_a);
    r.outcome_b = static_cast<std::uint8_t>(result.outcome_b);
    r.sifted = true;
    state = std::move(result.post_state);
  }

  Rng sampling_rng = rng.split(Stream::sampling);
  auto tests = select_test_set(n, config.m, sampling_rng);
  board.announce_test_positions(tests);
  for (auto t : tests) {
    data.records[t].in_test = true;
    data.error_count += data.records[t].outcome_a == data.records[t].outcome_b;
  }
  for (const auto& r : data.records) {
    if (r.in_test) continue;
    data.key_a.push_back(r.outcome_a);
    data.key_b.push_back(r.outcome_b ^ 1u);
  }
  data.accept = acceptance_range(config, tests.size());
  data.verdict = decide(data.accept, data.error_count);
  board.announce_verdict();

  if (data.verdict == Verdict::accepted) {
    TestPlan plan;
    plan.indices = tests;
    for (auto t : tests) plan.axes.push_back(axes[t]);
    plan.accept = data.accept;
    data.eve_holevo_bits = eve_info_bound(conditional_ancilla_state(attack, plan));
  }
  data.test_indices = std::move(tests);
  data.trace.assign(board.trace().begin(), board.trace().end());
  return Transcript(std::move(data));
}

}  // namespace

std::string_view to_string(Protocol protocol) noexcept {
  return protocol == Protocol::epr ? "epr" : "bb84";
}

std::string_view to_string(ThresholdMode mode) noexcept {
  return mode == ThresholdMode::window ? "window" : "two_epsilon";
}

std::string_view to_string(Verdict verdict) noexcept {
  return verdict == Verdict::accepted ? "accepted" : "rejected";
}

void SessionConfig::validate() const {
  if (n == 0) throw ConfigError("n", "N must be positive");
  if (m == 0) throw ConfigError("m", "the test sample must be nonempty");
  if (m > n) throw ConfigError("m", "test sample larger than N");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon", "must lie in [0, 1)");
  if (!(c > 0.0)) throw ConfigError("c", "window coefficient must be positive");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("omega", "must lie in [0, 1]");
}

std::size_t SessionConfig::default_epr_m(std::size_t n) {
  return std::min(n, static_cast<std::size_t>(std::ceil(10.0 * std::sqrt(static_cast<double>(n)))));
}

std::size_t SessionConfig::default_bb84_m(std::size_t n, double omega) {
  const auto per_diagonal = static_cast<std::size_t>(std::floor(static_cast<double>(n) * omega * omega + kRoundingGuard));
  return std::min(n, std::max<std::size_t>(2, per_diagonal - per_diagonal % 2));
}

AcceptanceRange acceptance_window(double epsilon, double c, std::size_t m) {
  if (m == 0) throw ConfigError("m", "the test sample must be nonempty");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("epsilon", "must lie in [0, 1)");
  if (!(c > 0.0)) throw ConfigError("c", "window coefficient must be positive");
  if (epsilon == 0.0) return AcceptanceRange::strict();
  const double md = static_cast<double>(m);
  const double spread = c * epsilon * epsilon;
  const std::int64_t lo = std::max<std::int64_t>(0, to_count(std::ceil((epsilon - spread) * md - kRoundingGuard)));
  const std::int64_t hi = to_count(std::floor((epsilon + spread) * md + kRoundingGuard));
  if (hi < lo) throw ConfigError("c", "acceptance window is empty after rounding");
  return {lo, hi};
}

AcceptanceRange acceptance_range(const SessionConfig& config, std::size_t tested) {
  if (config.threshold_mode == ThresholdMode::window)
    return acceptance_window(config.epsilon, config.c, tested);
  if (tested == 0) throw ConfigError("m", "the test sample must be nonempty");
  if (config.epsilon == 0.0) return AcceptanceRange::strict();
  const double bound = 2.0 * config.epsilon * static_cast<double>(tested);
  return {0, to_count(std::ceil(bound - kRoundingGuard)) - 1};
}

Verdict decide(AcceptanceRange range, std::size_t errors) noexcept {
  return range.contains(static_cast<std::int64_t>(errors)) ? Verdict::accepted : Verdict::rejected;
}

std::vector<std::size_t> select_test_set(std::size_t n, std::size_t m, Rng& rng) {
  if (m == 0) throw ConfigError("m", "the test sample must be nonempty");
  if (m > n) throw ConfigError("m", "test sample larger than N");
  return random_subset(n, m, rng);
}

// ---------------------------------------------------------------------------
// Transcript

Transcript::Transcript(TranscriptData data) : data_(std::move(data)) {
  std::size_t key_positions = 0;
  for (std::size_t i = 0; i < data_.records.size(); ++i) {
    const auto& r = data_.records[i];
    if (r.index != i) throw std::invalid_argument("transcript records must be indexed in order");
    sifted_ += r.sifted;
    key_positions += r.sifted && !r.in_test;
  }
  std::size_t flagged = 0;
  for (std::size_t k = 0; k < data_.test_indices.size(); ++k) {
    const auto t = data_.test_indices[k];
    if (t >= data_.records.size() || !data_.records[t].in_test || (k > 0 && data_.test_indices[k - 1] >= t))
      throw std::invalid_argument("transcript test indices must be sorted, distinct and flagged");
    ++flagged;
  }
  for (const auto& r : data_.records) flagged -= r.in_test;
  if (flagged != 0) throw std::invalid_argument("transcript test flags disagree with test indices");
  if (data_.key_a.size() != key_positions || data_.key_b.size() != key_positions)
    throw std::invalid_argument("transcript keys must cover exactly the untested sifted positions");
  if (decide(data_.accept, data_.error_count) != data_.verdict)
    throw std::invalid_argument("transcript verdict does not follow from the error count");
}

double Transcript::sifted_fraction() const noexcept {
  return data_.records.empty() ? 0.0 : static_cast<double>(sifted_) / static_cast<double>(data_.records.size());
}

ErrorEstimate Transcript::error_estimate() const {
  return estimate_error_rate(data_.error_count, data_.test_indices.size());
}

RawKeyPair Transcript::raw_key() const {
  RawKeyPair raw;
  raw.key_a = data_.key_a;
  raw.key_b = data_.key_b;
  raw.estimated_error = ErrorRate(error_estimate().value);
  return raw;
}

void write_jsonl(std::ostream& out, const Transcript& transcript) {
  const bool bb84 = transcript.protocol() == Protocol::bb84;
  const auto basis = [&](const MeasurementAxis& axis) {
    if (bb84) return std::string("\"") + (axis == MeasurementAxis::x_axis() ? "diagonal" : "rectilinear") + "\"";
    char buffer[96];
    std::snprintf(buffer, sizeof buffer, "[%.17g,%.17g,%.17g]", axis.x(), axis.y(), axis.z());
    return std::string(buffer);
  };
  for (const auto& r : transcript.records()) {
    out << "{\"index\":" << r.index << ",\"basis_a\":" << basis(r.axis_a) << ",\"basis_b\":" << basis(r.axis_b)
        << ",\"outcome_a\":" << int(r.outcome_a) << ",\"outcome_b\":" << int(r.outcome_b)
        << ",\"in_test\":" << (r.in_test ? "true" : "false") << ",\"sifted\":" << (r.sifted ? "true" : "false")
        << "}\n";
  }
}

// ---------------------------------------------------------------------------
// EPR scheme

Transcript run_epr_session(const SessionConfig& config, const ChannelModel& channel, Eavesdropper& eve,
                           Rng& rng) {
  config.validate();
  if (auto attack = eve.joint_source()) return run_coherent_epr(config, *attack, rng);

  const std::size_t n = config.n;
  Rng source_rng = rng.split(Stream::source);
  Rng eve_rng = rng.split(Stream::eavesdropper);
  std::vector<BellLabel> labels(n);
  for (auto& label : labels) label = channel.sample(source_rng);
  eve.tamper_source(labels, eve_rng);

  PublicChannel board(n);
  std::vector<PairState> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i] = bell_pair(labels[i]);
    eve.intercept_pair(i, pairs[i], board, eve_rng);
    board.deliver(i);
  }
  board.acknowledge();

  Rng alice_rng = rng.split(Stream::alice);
  std::vector<MeasurementAxis> axes;
  axes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) axes.push_back(MeasurementAxis::random(alice_rng));
  board.announce_bases(axes, axes);

  Rng measure_rng = rng.split(Stream::measurement);
  TranscriptData data;
  data.protocol = Protocol::epr;
  data.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const PairOutcome o = measure_pair(pairs[i], axes[i], axes[i], measure_rng);
    auto& r = data.records[i];
    r.index = i;
    r.axis_a = r.axis_b = axes[i];
    r.outcome_a = static_cast<std::uint8_t>(o.a);
    r.outcome_b = static_cast<std::uint8_t>(o.b);
    r.sifted = true;
  }

  Rng sampling_rng = rng.split(Stream::sampling);
  auto tests = select_test_set(n, config.m, sampling_rng);
  board.announce_test_positions(tests);
  for (auto t : tests) {
    data.records[t].in_test = true;
    data.error_count += data.records[t].outcome_a == data.records[t].outcome_b;
  }
  data.key_a.reserve(n - tests.size());
  data.key_b.reserve(n - tests.size());
  for (const auto& r : data.records) {
    if (r.in_test) continue;
    data.key_a.push_back(r.outcome_a);
    data.key_b.push_back(r.outcome_b ^ 1u);
  }
  data.accept = acceptance_range(config, tests.size());
  data.verdict = decide(data.accept, data.error_count);
  board.announce_verdict();
  data.test_indices = std::move(tests);
  data.trace.assign(board.trace().begin(), board.trace().end());
  return Transcript(std::move(data));
}

Transcript run_epr_session(const SessionConfig& config, const ChannelModel& channel,
                           const AttackSpec& attack, Rng& rng) {
  auto eve = make_eavesdropper(attack);
  return run_epr_session(config, channel, *eve, rng);
}

// ---------------------------------------------------------------------------
// BB84

Transcript run_bb84_session(const SessionConfig& config, const ChannelModel& channel, Eavesdropper& eve,
                            Rng& rng) {
  config.validate();
  if (eve.joint_source()) throw ConfigError("attack", "coherent attacks apply to the EPR scheme only");
  const std::size_t n = config.n;
  Rng source_rng = rng.split(Stream::source);
  Rng eve_rng = rng.split(Stream::eavesdropper);
  Rng alice_rng = rng.split(Stream::alice);

  Bb84Raw raw;
  raw.basis_a.resize(n);
  raw.bit_a.resize(n);
  PublicChannel board(n);
  std::vector<Photon> photons(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw.basis_a[i] = draw_basis(config.omega, alice_rng);
    raw.bit_a[i] = static_cast<std::uint8_t>(alice_rng.bernoulli(0.5));
    const Photon prepared =
        MeasurementAxis::for_basis(raw.basis_a[i]).spinor(raw.bit_a[i] ? Spin::down : Spin::up);
    photons[i] = label_pauli(channel.sample(source_rng)) * prepared;
    eve.intercept_photon(i, photons[i], board, eve_rng);
    board.deliver(i);
  }
  board.acknowledge();

  Rng bob_rng = rng.split(Stream::bob);
  Rng measure_rng = rng.split(Stream::measurement);
  raw.basis_b.resize(n);
  raw.bit_b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw.basis_b[i] = draw_basis(config.omega, bob_rng);
    raw.bit_b[i] = static_cast<std::uint8_t>(
        measure_photon(photons[i], MeasurementAxis::for_basis(raw.basis_b[i]), measure_rng));
  }

  std::vector<MeasurementAxis> axes_a, axes_b;
  for (std::size_t i = 0; i < n; ++i) {
    axes_a.push_back(MeasurementAxis::for_basis(raw.basis_a[i]));
    axes_b.push_back(MeasurementAxis::for_basis(raw.basis_b[i]));
  }
  board.announce_bases(std::move(axes_a), std::move(axes_b));
  Rng sampling_rng = rng.split(Stream::sampling);
  return finish_bb84(config, raw, board, sampling_rng);
}

Transcript run_bb84_session(const SessionConfig& config, const ChannelModel& channel,
                            const AttackSpec& attack, Rng& rng) {
  auto eve = make_eavesdropper(attack);
  return run_bb84_session(config, channel, *eve, rng);
}

Transcript run_bb84_epr_session(const SessionConfig& config, const ChannelModel& channel,
                                AliceTiming timing, Eavesdropper& eve, Rng& rng) {
  config.validate();
  if (eve.joint_source()) throw ConfigError("attack", "coherent attacks apply to the EPR scheme only");
  const std::size_t n = config.n;
  Rng source_rng = rng.split(Stream::source);
  Rng eve_rng = rng.split(Stream::eavesdropper);
  Rng alice_rng = rng.split(Stream::alice);
  Rng measure_rng = rng.split(Stream::measurement);

  Bb84Raw raw;
  raw.basis_a.resize(n);
  raw.bit_a.resize(n);
  std::vector<BellLabel> labels(n);
  for (auto& label : labels) label = channel.sample(source_rng);
  eve.tamper_source(labels, eve_rng);

  const auto alice_measures = [&](std::size_t i, PairState& pair) {
    raw.bit_a[i] = static_cast<std::uint8_t>(
        measure_member(pair, 0, MeasurementAxis::for_basis(raw.basis_a[i]), measure_rng));
  };

  PublicChannel board(n);
  std::vector<PairState> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw.basis_a[i] = draw_basis(config.omega, alice_rng);
    pairs[i] = bell_pair(labels[i]);
    if (timing == AliceTiming::before_transmission) alice_measures(i, pairs[i]);
    eve.intercept_pair(i, pairs[i], board, eve_rng);
    board.deliver(i);
  }
  board.acknowledge();
  if (timing == AliceTiming::after_transmission)
    for (std::size_t i = 0; i < n; ++i) alice_measures(i, pairs[i]);

  Rng bob_rng = rng.split(Stream::bob);
  raw.basis_b.resize(n);
  raw.bit_b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    raw.basis_b[i] = draw_basis(config.omega, bob_rng);
    raw.bit_b[i] = flip(measure_member(pairs[i], 1, MeasurementAxis::for_basis(raw.basis_b[i]), measure_rng));
  }

  std::vector<MeasurementAxis> axes_a, axes_b;
  for (std::size_t i = 0; i < n; ++i) {
    axes_a.push_back(MeasurementAxis::for_basis(raw.basis_a[i]));
    axes_b.push_back(MeasurementAxis::for_basis(raw.basis_b[i]));
  }
  board.announce_bases(std::move(axes_a), std::move(axes_b));
  Rng sampling_rng = rng.split(Stream::sampling);
  return finish_bb84(config, raw, board, sampling_rng);
}

EquivalenceReport epr_bb84_equivalence_check(const SessionConfig& config, const ChannelModel& channel,
                                             Rng& rng) {
  const NoAttack none;
  std::array<Transcript, 3> runs{
      [&] {
        Rng r = rng.split(1);
        return run_bb84_session(config, channel, AttackSpec{none}, r);
      }(),
      [&] {
        Rng r = rng.split(2);
        auto eve = make_eavesdropper(none);
        return run_bb84_epr_session(config, channel, AliceTiming::before_transmission, *eve, r);
      }(),
      [&] {
        Rng r = rng.split(3);
        auto eve = make_eavesdropper(none);
        return run_bb84_epr_session(config, channel, AliceTiming::after_transmission, *eve, r);
      }(),
  };

  EquivalenceReport report;
  report.positions = config.n;
  std::array<std::array<std::size_t, 16>, 3> counts{};
  for (std::size_t v = 0; v < 3; ++v) {
    std::size_t sifted = 0, errors = 0;
    for (const auto& r : runs[v].records()) {
      const std::size_t ba = r.axis_a == MeasurementAxis::x_axis();
      const std::size_t bb = r.axis_b == MeasurementAxis::x_axis();
      ++counts[v][((ba * 2 + bb) * 2 + r.outcome_a) * 2 + r.outcome_b];
      if (r.sifted) {
        ++sifted;
        errors += r.outcome_a != r.outcome_b;
      }
    }
    report.sifted_qber[v] = sifted ? static_cast<double>(errors) / static_cast<double>(sifted) : 0.0;
  }

  const double n = static_cast<double>(config.n);
  report.agree = true;
  for (std::size_t cell = 0; cell < 16; ++cell) {
    auto& c = report.cells[cell];
    c.basis_a = (cell >> 3) & 1 ? Basis::diagonal : Basis::rectilinear;
    c.basis_b = (cell >> 2) & 1 ? Basis::diagonal : Basis::rectilinear;
    c.bit_a = static_cast<std::uint8_t>((cell >> 1) & 1);
    c.bit_b = static_cast<std::uint8_t>(cell & 1);
    for (std::size_t v = 0; v < 3; ++v) c.frequency[v] = static_cast<double>(counts[v][cell]) / n;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        const double pooled = (c.frequency[i] + c.frequency[j]) / 2.0;
        const double sigma = std::sqrt(pooled * (1.0 - pooled) * 2.0 / n);
        const double diff = std::abs(c.frequency[i] - c.frequency[j]);
        const double z = sigma > 0.0 ? diff / sigma : (diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        c.max_z = std::max(c.max_z, z);
      }
    }
    if (c.max_z > 3.0) report.agree = false;
  }
  return report;
}

}  // namespace qkdlab
