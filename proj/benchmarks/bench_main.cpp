#include <benchmark/benchmark.h>

#include "qkdlab/adversary.hpp"
#include "qkdlab/bounds.hpp"
#include "qkdlab/postprocess.hpp"
#include "qkdlab/protocol.hpp"

using namespace qkdlab;

static void BM_Philox(benchmark::State& state) {
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(rng());
}
BENCHMARK(BM_Philox);

static void BM_EprSession(benchmark::State& state) {
  SessionConfig config;
  config.n = static_cast<std::size_t>(state.range(0));
  config.m = SessionConfig::default_epr_m(config.n);
  config.epsilon = 0.02;
  config.threshold_mode = ThresholdMode::two_epsilon;
  const auto channel = ChannelModel::from_error_rate(ErrorRate(0.02));
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng rng = trial_stream(7, trial++);
    benchmark::DoNotOptimize(run_epr_session(config, channel, AttackSpec{NoAttack{}}, rng).error_count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EprSession)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_Bb84Session(benchmark::State& state) {
  SessionConfig config;
  config.n = static_cast<std::size_t>(state.range(0));
  config.omega = 0.2;
  config.m = SessionConfig::default_bb84_m(config.n, config.omega);
  config.epsilon = 0.02;
  config.threshold_mode = ThresholdMode::two_epsilon;
  const auto channel = ChannelModel::from_error_rate(ErrorRate(0.02));
  std::uint64_t trial = 0;
  for (auto _ : state) {
    Rng rng = trial_stream(8, trial++);
    benchmark::DoNotOptimize(run_bb84_session(config, channel, AttackSpec{NoAttack{}}, rng).error_count());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Bb84Session)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_Reconcile(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(9);
  BitString a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<std::uint8_t>(rng() & 1);
    b[i] = a[i] ^ static_cast<std::uint8_t>(rng.bernoulli(0.02));
  }
  ReconcileOptions opts;
  opts.error_hint = 0.02;
  for (auto _ : state) benchmark::DoNotOptimize(reconcile(a, b, rng, opts).leaked_bits);
}
BENCHMARK(BM_Reconcile)->Arg(4096)->Arg(90000)->Unit(benchmark::kMillisecond);

static void BM_PrivacyAmplify(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(10);
  BitString key(n);
  for (auto& bit : key) bit = static_cast<std::uint8_t>(rng() & 1);
  for (auto _ : state) benchmark::DoNotOptimize(privacy_amplify(key, n / 2, 11).size());
}
BENCHMARK(BM_PrivacyAmplify)->Arg(10000)->Arg(90000)->Unit(benchmark::kMillisecond);

static void BM_PassingProbability(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(12);
  CVector amps(static_cast<Eigen::Index>((std::size_t{1} << (2 * n)) * 4));
  for (Eigen::Index i = 0; i < amps.size(); ++i) amps(i) = {rng.normal(), rng.normal()};
  const CoherentAttack attack(n, 4, amps.normalized());
  TestPlan plan;
  for (std::size_t i = 0; i < n; ++i) {
    plan.indices.push_back(i);
    plan.axes.push_back(MeasurementAxis::random(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(passing_probability(attack, plan));
}
BENCHMARK(BM_PassingProbability)->DenseRange(2, 6, 2);

static void BM_DimensionChain(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(atypical_dim_chain(n, 0.05).log2_l1);
}
BENCHMARK(BM_DimensionChain)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_EntropyInequalitySweep(benchmark::State& state) {
  for (auto _ : state)
    for (std::size_t n = 0; n <= 200; ++n)
      for (std::size_t r = 0; r <= n; ++r) benchmark::DoNotOptimize(binomial_entropy_inequality(n, r).holds);
}
BENCHMARK(BM_EntropyInequalitySweep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
