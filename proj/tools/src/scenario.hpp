#pragma once

// Scenario runner shared by the qkdlab binary and the tests.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkdlab/adversary.hpp"
#include "qkdlab/bounds.hpp"
#include "qkdlab/protocol.hpp"

namespace qkdlab::cli {

struct Scenario {
  std::string name = "scenario";
  Protocol protocol = Protocol::epr;
  std::size_t n = 1000;
  std::optional<std::size_t> m;
  std::optional<double> fidelity;
  std::optional<double> epsilon;
  double omega = 0.5;
  double c = 1.0;
  std::optional<ThresholdMode> threshold_mode;
  /// none | intercept-resend[:rectilinear|diagonal|random] | substitute:<fraction> | coherent
  std::string attack = "none";
  std::string attack_file;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  double kprime = 10.0;
  double theta = 0.0;
  std::string out;
  std::string summary;

  /// Fills defaults (m, the missing one of fidelity/epsilon, threshold mode)
  /// and validates every field. Throws ConfigError naming the field.
  SessionConfig session_config() const;
  ChannelModel channel() const;
  AttackSpec attack_spec() const;
};

/// Applies the keys of a scenario JSON object over `base`. Unknown keys are
/// rejected.
Scenario apply_json(Scenario base, const nlohmann::json& object);
Scenario load_scenario(const std::string& path, Scenario base = {});

struct TrialRow {
  std::size_t trial = 0;
  Verdict verdict = Verdict::rejected;
  std::size_t error_count = 0;
  std::size_t m = 0;
  double qber_estimate = 0.0;
  std::size_t sifted_len = 0;
  std::size_t final_len = 0;
  std::size_t leaked_bits = 0;
  std::optional<double> eve_holevo_bits;
  /// Positions counted as sifted (EPR: all N).
  std::size_t sifted_positions = 0;
  bool keys_equal = false;
};

struct ScenarioResult {
  Scenario scenario;
  SessionConfig config;
  std::vector<TrialRow> rows;

  void write_csv(std::ostream& out) const;
  nlohmann::json summary() const;
};

/// Trial t draws from trial_stream(seed, t). Accepted sessions are reconciled
/// and amplified to final_key_length at the estimated error rate.
ScenarioResult run_scenario(const Scenario& scenario);

/// Full bound report as JSON: raw values when exact, log2 values throughout.
nlohmann::json bound_report_json(const BoundReport& report, double theta);
nlohmann::json run_bounds(std::size_t n, double epsilon, double kprime, double theta);

/// One CSV row per (N, epsilon); points outside the regime carry the
/// offending parameter in the status column.
void write_bounds_grid(std::ostream& out, const std::vector<std::size_t>& ns,
                       const std::vector<double>& epsilons, double kprime, double theta);

struct AttackEvalOptions {
  std::size_t m = 0;  // 0 means m = N
  double epsilon = 0.0;
  double c = 1.0;
  ThresholdMode threshold_mode = ThresholdMode::window;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double theta = 0.0;
};

nlohmann::json evaluate_attack(const CoherentAttack& attack, const AttackEvalOptions& options);

nlohmann::json equivalence_json(const EquivalenceReport& report);

/// Shortest round-trip decimal form, used for every float the CLI writes.
std::string format_double(double value);

}  // namespace qkdlab::cli
