#include "scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "qkdlab/errors.hpp"
#include "qkdlab/postprocess.hpp"

namespace qkdlab::cli {

using nlohmann::json;

namespace {

constexpr std::uint64_t kDistillStream = 0xd157;

ThresholdMode parse_threshold_mode(const std::string& text) {
  if (text == "window") return ThresholdMode::window;
  if (text == "two_epsilon" || text == "two-epsilon") return ThresholdMode::two_epsilon;
  throw ConfigError("threshold_mode", "expected window or two_epsilon, got '" + text + "'");
}

Protocol parse_protocol(const std::string& text) {
  if (text == "epr") return Protocol::epr;
  if (text == "bb84") return Protocol::bb84;
  throw ConfigError("protocol", "expected epr or bb84, got '" + text + "'");
}

template <class T>
T field(const json& object, const char* key) {
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("bad value in scenario file: ") + e.what());
  }
}

std::string csv_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

SessionConfig Scenario::session_config() const {
  if (trials == 0) throw ConfigError("trials", "at least one trial is required");
  if (fidelity && !(*fidelity >= 0.0 && *fidelity <= 1.0)) throw ConfigError("fidelity", "must lie in [0, 1]");
  if (epsilon && !(*epsilon >= 0.0 && *epsilon <= 2.0 / 3.0)) throw ConfigError("epsilon", "must lie in [0, 2/3]");
  if (!(omega >= 0.0 && omega <= 1.0)) throw ConfigError("omega", "must lie in [0, 1]");
  if (n == 0) throw ConfigError("n", "N must be positive");

  SessionConfig config;
  config.n = n;
  config.epsilon = epsilon ? *epsilon : epsilon_from_fidelity(fidelity.value_or(1.0)).value();
  config.c = c;
  config.omega = omega;
  config.seed = seed;
  config.threshold_mode = threshold_mode.value_or(protocol == Protocol::epr ? ThresholdMode::window
                                                                           : ThresholdMode::two_epsilon);
  config.m = m ? *m
               : (protocol == Protocol::epr ? SessionConfig::default_epr_m(n)
                                            : SessionConfig::default_bb84_m(n, omega));
  config.validate();
  if (!(kprime > 0.0)) throw ConfigError("kprime", "k' must be positive");
  if (!(theta >= 0.0)) throw ConfigError("theta", "must be non-negative");
  acceptance_range(config, config.m);
  return config;
}

ChannelModel Scenario::channel() const {
  if (fidelity) return ChannelModel(*fidelity);
  if (epsilon) return ChannelModel::from_error_rate(ErrorRate(*epsilon));
  return ChannelModel::ideal();
}

AttackSpec Scenario::attack_spec() const {
  const auto colon = attack.find(':');
  const std::string kind = attack.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : attack.substr(colon + 1);
  if (kind == "none") return NoAttack{};
  if (kind == "intercept-resend") {
    if (arg.empty() || arg == "random") return InterceptResendAttack{InterceptPolicy::random};
    if (arg == "rectilinear") return InterceptResendAttack{InterceptPolicy::rectilinear};
    if (arg == "diagonal") return InterceptResendAttack{InterceptPolicy::diagonal};
    throw ConfigError("attack", "unknown intercept policy '" + arg + "'");
  }
  if (kind == "substitute") {
    double fraction = -1.0;
    const auto result = std::from_chars(arg.data(), arg.data() + arg.size(), fraction);
    if (result.ec != std::errc() || result.ptr != arg.data() + arg.size() || !(fraction >= 0.0 && fraction <= 1.0))
      throw ConfigError("attack", "substitute needs a fraction in [0, 1], e.g. substitute:0.02");
    return SubstitutionAttack{fraction};
  }
  if (kind == "coherent") {
    if (attack_file.empty()) throw ConfigError("attack_file", "coherent attack needs --attack-file");
    if (!std::ifstream(attack_file)) throw ConfigError("attack_file", "cannot open '" + attack_file + "'");
    try {
      return load_coherent_attack(attack_file);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("attack_file", e.what());
    }
  }
  throw ConfigError("attack", "unknown attack '" + attack + "'");
}

Scenario apply_json(Scenario s, const json& object) {
  if (!object.is_object()) throw ConfigError("scenario", "scenario file must hold a JSON object");
  for (const auto& [key, value] : object.items()) {
    if (key == "name") s.name = field<std::string>(object, "name");
    else if (key == "protocol") s.protocol = parse_protocol(field<std::string>(object, "protocol"));
    else if (key == "n") s.n = field<std::size_t>(object, "n");
    else if (key == "m") s.m = field<std::size_t>(object, "m");
    else if (key == "fidelity") s.fidelity = field<double>(object, "fidelity");
    else if (key == "epsilon") s.epsilon = field<double>(object, "epsilon");
    else if (key == "omega") s.omega = field<double>(object, "omega");
    else if (key == "c") s.c = field<double>(object, "c");
    else if (key == "threshold_mode") s.threshold_mode = parse_threshold_mode(field<std::string>(object, key.c_str()));
    else if (key == "attack") s.attack = field<std::string>(object, "attack");
    else if (key == "attack_file") s.attack_file = field<std::string>(object, "attack_file");
    else if (key == "trials") s.trials = field<std::size_t>(object, "trials");
    else if (key == "seed") s.seed = field<std::uint64_t>(object, "seed");
    else if (key == "kprime") s.kprime = field<double>(object, "kprime");
    else if (key == "theta") s.theta = field<double>(object, "theta");
    else if (key == "out") s.out = field<std::string>(object, "out");
    else if (key == "summary") s.summary = field<std::string>(object, "summary");
    else throw ConfigError(key, "unknown scenario key");
    (void)value;
  }
  return s;
}

Scenario load_scenario(const std::string& path, Scenario base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario", "cannot open '" + path + "'");
  json object;
  try {
    object = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("scenario", e.what());
  }
  return apply_json(std::move(base), object);
}

ScenarioResult run_scenario(const Scenario& scenario) {
  ScenarioResult result;
  result.scenario = scenario;
  result.config = scenario.session_config();
  const ChannelModel channel = scenario.channel();
  const AttackSpec attack = scenario.attack_spec();

  for (std::size_t t = 0; t < scenario.trials; ++t) {
    Rng rng = trial_stream(scenario.seed, t);
    const Transcript transcript = scenario.protocol == Protocol::epr
                                      ? run_epr_session(result.config, channel, attack, rng)
                                      : run_bb84_session(result.config, channel, attack, rng);
    TrialRow row;
    row.trial = t;
    row.verdict = transcript.verdict();
    row.error_count = transcript.error_count();
    row.m = transcript.tested();
    row.qber_estimate = transcript.error_estimate().value;
    row.sifted_len = transcript.key_a().size();
    row.sifted_positions = transcript.sifted_count();
    row.eve_holevo_bits = transcript.eve_holevo_bits();
    if (transcript.accepted() && row.qber_estimate < 0.25) {
      Rng distill_rng = rng.split(kDistillStream);
      const DistilledKey key = distill(transcript.raw_key(), scenario.kprime, distill_rng);
      row.final_len = key.final_length;
      row.leaked_bits = key.leaked_bits;
      row.keys_equal = key.final_a == key.final_b;
    }
    result.rows.push_back(row);
  }
  return result;
}

void ScenarioResult::write_csv(std::ostream& out) const {
  out << "trial,verdict,error_count,m,qber_estimate,sifted_len,final_len,leaked_bits,eve_holevo_bits\n";
  for (const auto& r : rows) {
    out << r.trial << ',' << to_string(r.verdict) << ',' << r.error_count << ',' << r.m << ','
        << format_double(r.qber_estimate) << ',' << r.sifted_len << ',' << r.final_len << ',' << r.leaked_bits
        << ',' << csv_optional(r.eve_holevo_bits) << '\n';
  }
}

json ScenarioResult::summary() const {
  std::size_t accepted = 0, equal_keys = 0;
  double qber = 0.0, sifted_fraction = 0.0, final_len = 0.0, leaked = 0.0;
  for (const auto& r : rows) {
    accepted += r.verdict == Verdict::accepted;
    equal_keys += r.keys_equal;
    qber += r.qber_estimate;
    sifted_fraction += static_cast<double>(r.sifted_positions) / static_cast<double>(config.n);
    final_len += static_cast<double>(r.final_len);
    leaked += static_cast<double>(r.leaked_bits);
  }
  const auto trials = static_cast<double>(rows.size());
  json j;
  j["name"] = scenario.name;
  j["protocol"] = std::string(to_string(scenario.protocol));
  j["n"] = config.n;
  j["m"] = config.m;
  j["epsilon"] = config.epsilon;
  j["fidelity"] = scenario.channel().fidelity();
  j["omega"] = config.omega;
  j["c"] = config.c;
  j["threshold_mode"] = std::string(to_string(config.threshold_mode));
  j["attack"] = scenario.attack;
  j["seed"] = config.seed;
  j["kprime"] = scenario.kprime;
  j["rng"] = "philox4x32-10";
  j["trials"] = rows.size();
  j["accepted"] = accepted;
  j["acceptance_rate"] = static_cast<double>(accepted) / trials;
  j["qber"] = qber / trials;
  j["sifted_fraction"] = sifted_fraction / trials;
  j["mean_final_len"] = final_len / trials;
  j["mean_leaked_bits"] = leaked / trials;
  j["final_keys_equal"] = equal_keys;
  return j;
}

json bound_report_json(const BoundReport& r, double theta) {
  json j;
  j["n"] = r.n;
  j["epsilon"] = r.epsilon;
  j["threshold"] = r.threshold;
  j["epsilon_eff"] = r.epsilon_eff;
  j["exact_atypical_count"] = r.exact_atypical_count.str();
  j["l1"] = r.l1.str();
  j["l2"] = r.l2.str();
  j["log2_exact_atypical_count"] = r.log2_exact;
  j["log2_l1"] = r.log2_l1;
  j["log2_l2"] = r.log2_l2;
  j["log2_l3"] = r.log2_l3;
  j["log2_l3_nominal"] = r.log2_l3_nominal;
  j["log2_l4"] = r.log2_l4;
  j["log2_l5"] = r.log2_l5;
  j["mu"] = r.mu;
  j["implied_k"] = r.implied_k;
  j["margin_bits"] = r.margin_bits();
  j["chain_ordered"] = r.ordered();
  j["kprime"] = r.kprime;
  j["capacity_lower_bound"] = r.capacity_lower_bound;
  j["theta"] = theta;
  j["eve_info_upper_bits"] = eve_info_upper(r, theta);
  return j;
}

json run_bounds(std::size_t n, double epsilon, double kprime, double theta) {
  if (!(theta >= 0.0)) throw ConfigError("theta", "must be non-negative");
  return bound_report_json(atypical_dim_chain(n, epsilon, {}, kprime), theta);
}

void write_bounds_grid(std::ostream& out, const std::vector<std::size_t>& ns,
                       const std::vector<double>& epsilons, double kprime, double theta) {
  out << "n,epsilon,status,threshold,exact_atypical_count,log2_exact,log2_l1,log2_l2,log2_l3,log2_l4,"
         "log2_l5,mu,implied_k,chain_ordered,capacity_lower_bound,eve_info_upper_bits\n";
  for (auto n : ns) {
    for (auto eps : epsilons) {
      out << n << ',' << format_double(eps) << ',';
      try {
        const BoundReport r = atypical_dim_chain(n, eps, {}, kprime);
        out << "ok," << r.threshold << ',' << r.exact_atypical_count.str() << ',' << format_double(r.log2_exact)
            << ',' << format_double(r.log2_l1) << ',' << format_double(r.log2_l2) << ','
            << format_double(r.log2_l3) << ',' << format_double(r.log2_l4) << ',' << format_double(r.log2_l5)
            << ',' << format_double(r.mu) << ',' << format_double(r.implied_k) << ','
            << (r.ordered() ? "true" : "false") << ',' << format_double(r.capacity_lower_bound) << ','
            << format_double(eve_info_upper(r, theta)) << '\n';
      } catch (const RegimeError& e) {
        out << "regime:" << e.parameter() << ",,,,,,,,,,,,";
        try {
          out << format_double(secrecy_lower_bound(eps, kprime));
        } catch (const RegimeError&) {
        }
        out << ",\n";
      }
    }
  }
}

json evaluate_attack(const CoherentAttack& attack, const AttackEvalOptions& o) {
  const std::size_t n = attack.n_pairs();
  SessionConfig config;
  config.n = n;
  config.m = o.m == 0 ? n : o.m;
  config.epsilon = o.epsilon;
  config.c = o.c;
  config.threshold_mode = o.threshold_mode;
  config.validate();
  const AcceptanceRange accept = acceptance_range(config, config.m);

  Rng rng(o.seed);
  const AveragedPassing averaged = averaged_passing_probability(attack, config.m, accept, o.samples, rng);
  const TypicalitySplit split = typicality_split(attack, typicality_threshold(n, o.epsilon));

  TestPlan z_plan;
  z_plan.accept = accept;
  for (std::size_t i = 0; i < config.m; ++i) {
    z_plan.indices.push_back(i);
    z_plan.axes.push_back(MeasurementAxis::z_axis());
  }
  const double z_pass = passing_probability(attack, z_plan);

  json j;
  j["n_pairs"] = n;
  j["ancilla_dim"] = attack.ancilla_dim();
  j["m"] = config.m;
  j["accept_lo"] = accept.lo;
  j["accept_hi"] = accept.hi;
  j["threshold"] = split.threshold;
  j["typical_weight"] = split.typical_weight;
  j["atypical_weight"] = split.atypical_weight;
  j["passing_probability_mean"] = averaged.mean;
  j["passing_probability_stderr"] = averaged.standard_error;
  j["axis_samples"] = averaged.samples;
  j["passing_probability_z_axes"] = z_pass;
  j["eve_holevo_bits_z_axes"] =
      z_pass > 1e-15 ? json(eve_info_bound(conditional_ancilla_state(attack, z_plan))) : json(nullptr);
  j["eve_info_upper_bits"] = eve_info_upper(n, o.epsilon, o.theta);
  j["seed"] = o.seed;
  return j;
}

json equivalence_json(const EquivalenceReport& report) {
  json j;
  j["positions"] = report.positions;
  j["agree"] = report.agree;
  j["sifted_qber"] = {{"direct", report.sifted_qber[0]},
                      {"epr_before_transmission", report.sifted_qber[1]},
                      {"epr_after_acknowledgment", report.sifted_qber[2]}};
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"basis_a", std::string(to_string(c.basis_a))},
                     {"basis_b", std::string(to_string(c.basis_b))},
                     {"bit_a", c.bit_a},
                     {"bit_b", c.bit_b},
                     {"frequency", c.frequency},
                     {"max_z", c.max_z}});
  }
  j["cells"] = cells;
  return j;
}

}  // namespace qkdlab::cli
