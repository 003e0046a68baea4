#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qkdlab/errors.hpp"
#include "scenario.hpp"

namespace {

using qkdlab::ConfigError;
using qkdlab::cli::Scenario;

constexpr int kConfigExit = 2;
constexpr int kRegimeExit = 3;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("out", "cannot write '" + path + "'");
  out << text;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) parts.push_back(item);
  return parts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qkdlab: EPR and BB84 key distribution simulator"};
  app.require_subcommand(1);

  Scenario flags;
  std::string scenario_file, protocol = "epr", threshold_mode;
  std::size_t m = 0;
  double fidelity = -1.0, epsilon = -1.0;

  auto* simulate = app.add_subcommand("simulate", "Run protocol sessions and write per-trial CSV");
  simulate->add_option("--scenario", scenario_file, "JSON scenario file; its keys override flags");
  simulate->add_option("--protocol", protocol, "epr or bb84")->check(CLI::IsMember({"epr", "bb84"}));
  simulate->add_option("--n", flags.n, "Pairs or photons per session");
  simulate->add_option("--m", m, "Test sample size (default depends on protocol)");
  auto* fid = simulate->add_option("--fidelity", fidelity, "Channel singlet fidelity F");
  simulate->add_option("--epsilon", epsilon, "Expected error rate")->excludes(fid);
  simulate->add_option("--omega", flags.omega, "Diagonal basis probability (bb84)");
  simulate->add_option("--attack", flags.attack,
                       "none | intercept-resend[:policy] | substitute:<fraction> | coherent");
  simulate->add_option("--attack-file", flags.attack_file, "Coherent attack amplitude file");
  simulate->add_option("--trials", flags.trials, "Number of sessions");
  simulate->add_option("--seed", flags.seed, "64-bit seed");
  simulate->add_option("--kprime", flags.kprime, "k' in the secrecy bound");
  simulate->add_option("--theta", flags.theta, "theta in the Holevo upper bound");
  simulate->add_option("--c", flags.c, "Acceptance window coefficient");
  simulate->add_option("--threshold-mode", threshold_mode, "window or two_epsilon");
  simulate->add_option("--out", flags.out, "CSV output path (default stdout)");
  simulate->add_option("--summary", flags.summary, "JSON summary path");
  simulate->add_option("--name", flags.name, "Scenario name");

  std::size_t bound_n = 100;
  double bound_eps = 0.01, bound_kprime = 10.0, bound_theta = 0.0;
  std::string grid_n, grid_eps, bound_out;
  auto* bounds = app.add_subcommand("bounds", "Evaluate the atypical-dimension chain and capacity bounds");
  bounds->add_option("--n", bound_n, "N");
  bounds->add_option("--epsilon", bound_eps, "Error rate");
  bounds->add_option("--kprime", bound_kprime, "k' in the secrecy bound");
  bounds->add_option("--theta", bound_theta, "theta in the Holevo upper bound");
  bounds->add_option("--grid-n", grid_n, "Comma-separated N values; emits a CSV sweep");
  bounds->add_option("--grid-epsilon", grid_eps, "Comma-separated epsilon values for the sweep");
  bounds->add_option("--out", bound_out, "Output path (default stdout)");

  std::string eval_file, eval_out, eval_mode = "window";
  qkdlab::cli::AttackEvalOptions eval;
  auto* attack_eval = app.add_subcommand("attack-eval", "Exact analysis of a coherent attack file");
  attack_eval->add_option("--attack-file", eval_file, "Coherent attack amplitude file")->required();
  attack_eval->add_option("--m", eval.m, "Test pairs (default N)");
  attack_eval->add_option("--epsilon", eval.epsilon, "Expected error rate (0 for strict acceptance)");
  attack_eval->add_option("--c", eval.c, "Acceptance window coefficient");
  attack_eval->add_option("--threshold-mode", eval_mode, "window or two_epsilon");
  attack_eval->add_option("--samples", eval.samples, "Axis samples for the averaged passing probability");
  attack_eval->add_option("--seed", eval.seed, "64-bit seed");
  attack_eval->add_option("--theta", eval.theta, "theta in the Holevo upper bound");
  attack_eval->add_option("--out", eval_out, "Output path (default stdout)");

  Scenario eq;
  eq.n = 100000;
  eq.omega = 0.5;
  std::string eq_out;
  double eq_fidelity = 1.0;
  auto* equivalence = app.add_subcommand("equivalence", "Compare direct and EPR-built BB84 statistics");
  equivalence->add_option("--n", eq.n, "Photons per construction");
  equivalence->add_option("--fidelity", eq_fidelity, "Channel singlet fidelity F");
  equivalence->add_option("--omega", eq.omega, "Diagonal basis probability");
  equivalence->add_option("--seed", eq.seed, "64-bit seed");
  equivalence->add_option("--out", eq_out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      flags.protocol = protocol == "bb84" ? qkdlab::Protocol::bb84 : qkdlab::Protocol::epr;
      if (m > 0) flags.m = m;
      if (simulate->count("--fidelity")) flags.fidelity = fidelity;
      if (simulate->count("--epsilon")) flags.epsilon = epsilon;
      if (!threshold_mode.empty())
        flags = qkdlab::cli::apply_json(flags, {{"threshold_mode", threshold_mode}});
      if (!scenario_file.empty()) flags = qkdlab::cli::load_scenario(scenario_file, flags);

      const auto result = qkdlab::cli::run_scenario(flags);
      std::ostringstream csv;
      result.write_csv(csv);
      emit(flags.out, csv.str());
      if (!flags.summary.empty()) emit(flags.summary, result.summary().dump(2) + "\n");
    } else if (*bounds) {
      if (!grid_n.empty() || !grid_eps.empty()) {
        std::vector<std::size_t> ns;
        std::vector<double> eps;
        try {
          for (const auto& s : split_list(grid_n)) ns.push_back(std::stoul(s));
          for (const auto& s : split_list(grid_eps)) eps.push_back(std::stod(s));
        } catch (const std::exception&) {
          throw ConfigError("grid", "grid values must be comma-separated numbers");
        }
        if (ns.empty() || eps.empty()) throw ConfigError("grid", "both --grid-n and --grid-epsilon are required");
        std::ostringstream csv;
        qkdlab::cli::write_bounds_grid(csv, ns, eps, bound_kprime, bound_theta);
        emit(bound_out, csv.str());
      } else {
        emit(bound_out, qkdlab::cli::run_bounds(bound_n, bound_eps, bound_kprime, bound_theta).dump(2) + "\n");
      }
    } else if (*attack_eval) {
      Scenario s;
      s.attack = "coherent";
      s.attack_file = eval_file;
      eval.threshold_mode = qkdlab::cli::apply_json(s, {{"threshold_mode", eval_mode}}).threshold_mode.value();
      const auto attack = std::get<qkdlab::CoherentAttack>(s.attack_spec());
      emit(eval_out, qkdlab::cli::evaluate_attack(attack, eval).dump(2) + "\n");
    } else if (*equivalence) {
      eq.fidelity = eq_fidelity;
      eq.protocol = qkdlab::Protocol::bb84;
      const auto config = eq.session_config();
      qkdlab::Rng rng(eq.seed);
      const auto report = qkdlab::epr_bb84_equivalence_check(config, eq.channel(), rng);
      emit(eq_out, qkdlab::cli::equivalence_json(report).dump(2) + "\n");
    }
  } catch (const qkdlab::RegimeError& e) {
    std::fprintf(stderr, "regime error: %s\n", e.what());
    return kRegimeExit;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const qkdlab::UndersamplingError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigExit;
  }
  return 0;
}
