#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "qkdlab/adversary.hpp"
#include "qkdlab/bounds.hpp"
#include "qkdlab/channel.hpp"

using namespace qkdlab;

namespace {

CVector random_vector(std::size_t dim, Rng& rng) {
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {rng.normal(), rng.normal()};
  return v.normalized();
}

CoherentAttack random_attack(std::size_t n, std::size_t d, Rng& rng) {
  return CoherentAttack(n, d, random_vector((std::size_t{1} << (2 * n)) * d, rng));
}

std::size_t count_non_singlets(std::size_t index, std::size_t n, const std::vector<std::size_t>& slots) {
  std::size_t k = 0;
  for (auto slot : slots) k += (index >> (2 * (n - 1 - slot))) % 4 != 0;
  return k;
}

// Axis-averaged passing probability. Averaged over independent uniform axes,
// each tested pair's antiparallel projector becomes |psi0><psi0| + P_triplet/3,
// which is diagonal in the Bell basis, so each Bell-product component passes
// independently: a tested triplet errs with probability 2/3, a singlet never.
double averaged_pass_oracle(const CoherentAttack& a, std::size_t m, AcceptanceRange accept) {
  const std::size_t n = a.n_pairs(), d = a.ancilla_dim();
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != m) continue;
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.push_back(i);
    subsets.push_back(s);
  }
  double total = 0.0;
  for (std::size_t label = 0; label < (std::size_t{1} << (2 * n)); ++label) {
    const double w = a.bell_amplitudes().segment(static_cast<Eigen::Index>(label * d), static_cast<Eigen::Index>(d)).squaredNorm();
    double pass = 0.0;
    for (const auto& s : subsets) {
      const std::size_t k = count_non_singlets(label, n, s);
      for (std::size_t e = 0; e <= k; ++e)
        if (accept.contains(static_cast<std::int64_t>(e))) pass += oracle::binomial_pmf(k, e, 2.0 / 3.0);
    }
    total += w * pass / static_cast<double>(subsets.size());
  }
  return total;
}

// Fixed-axis passing probability from explicit 2^(2N) x 2^(2N) projectors.
double brute_force_pass(const CoherentAttack& a, const TestPlan& plan) {
  const std::size_t n = a.n_pairs(), d = a.ancilla_dim();
  const QuantumState joint = a.joint_state();
  const std::size_t qubits = 2 * n;
  double total = 0.0;
  const std::size_t m = plan.indices.size();
  for (std::size_t pattern = 0; pattern < (std::size_t{1} << (2 * m)); ++pattern) {
    std::int64_t errors = 0;
    CMatrix op = CMatrix::Identity(1, 1);
    std::vector<Eigen::Matrix2cd> per_qubit(qubits, Eigen::Matrix2cd::Identity());
    for (std::size_t t = 0; t < m; ++t) {
      const int sa = pattern >> (2 * t) & 1, sb = pattern >> (2 * t + 1) & 1;
      errors += sa == sb;
      const auto p = spin_projectors(plan.axes[t]);
      per_qubit[2 * plan.indices[t]] = sa ? p.down : p.up;
      per_qubit[2 * plan.indices[t] + 1] = sb ? p.down : p.up;
    }
    if (!plan.accept.contains(errors)) continue;
    for (auto it = per_qubit.rbegin(); it != per_qubit.rend(); ++it) {
      const Eigen::Matrix2cd& q = *it;
      CMatrix next(op.rows() * 2, op.cols() * 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) next.block(i * op.rows(), j * op.cols(), op.rows(), op.cols()) = q(i, j) * op;
      op = next;
    }
    CVector projected = CVector::Zero(joint.amplitudes().size());
    for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(d); ++r) {
      CVector slice(op.cols());
      for (Eigen::Index i = 0; i < slice.size(); ++i) slice(i) = joint.amplitudes()(i * static_cast<Eigen::Index>(d) + r);
      const CVector out = op * slice;
      for (Eigen::Index i = 0; i < out.size(); ++i) projected(i * static_cast<Eigen::Index>(d) + r) = out(i);
    }
    total += projected.squaredNorm();
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Intercept-resend and substitution

TEST(InterceptResend, SameBasisLeavesPhotonUnchanged) {
  Rng rng(71);
  for (int bit = 0; bit < 2; ++bit) {
    for (Basis b : {Basis::rectilinear, Basis::diagonal}) {
      const Photon sent = MeasurementAxis::for_basis(b).spinor(bit ? Spin::down : Spin::up);
      const auto policy = b == Basis::rectilinear ? InterceptPolicy::rectilinear : InterceptPolicy::diagonal;
      for (int k = 0; k < 50; ++k) {
        const auto r = intercept_resend(sent, policy, rng);
        EXPECT_EQ(r.eve_bit, bit);
        EXPECT_NEAR(std::abs(r.resent.dot(sent)), 1.0, 1e-12);
      }
    }
  }
}

TEST(InterceptResend, ConjugateBasisRandomizesBob) {
  // Alice rectilinear, Eve diagonal, Bob rectilinear: Bob wrong with
  // probability |<0|+>|^2 |<+|1>|^2 + |<0|->|^2 |<-|1>|^2 = 1/2.
  Rng rng(72);
  const Photon sent = MeasurementAxis::z_axis().spinor(Spin::up);
  const int n = 40000;
  int wrong = 0;
  for (int k = 0; k < n; ++k) {
    Photon p = intercept_resend(sent, InterceptPolicy::diagonal, rng).resent;
    wrong += measure_photon(p, MeasurementAxis::z_axis(), rng) == Spin::down;
  }
  EXPECT_TRUE(oracle::within_sigmas(static_cast<double>(wrong) / n, 0.5, n));
}

TEST(Substitution, ZeroFractionKeepsSinglets) {
  Rng rng(73);
  const auto labels = substitute_pairs(1000, 0.0, SubstitutionAttack{}.label_weights, rng);
  EXPECT_TRUE(std::all_of(labels.begin(), labels.end(), [](BellLabel l) { return l == 0; }));
}

TEST(Substitution, ExactCountAndRejectsSingletWeight) {
  Rng rng(74);
  const auto labels = substitute_pairs(1001, 0.3, SubstitutionAttack{}.label_weights, rng);
  EXPECT_EQ(std::count_if(labels.begin(), labels.end(), [](BellLabel l) { return l != 0; }), 300);
  EXPECT_THROW(substitute_pairs(10, 0.5, {0.1, 0.3, 0.3, 0.3}, rng), std::invalid_argument);
  EXPECT_THROW(substitute_pairs(10, 1.5, SubstitutionAttack{}.label_weights, rng), std::invalid_argument);
}

TEST(Substitution, FullSubstitutionAntiparallelThird) {
  Rng rng(75);
  const std::size_t n = 60000;
  const auto labels = substitute_pairs(n, 1.0, SubstitutionAttack{}.label_weights, rng);
  std::size_t anti = 0;
  for (auto label : labels) {
    PairState pair = bell_pair(label);
    const auto axis = MeasurementAxis::random(rng);
    const auto o = measure_pair(pair, axis, axis, rng);
    anti += o.a != o.b;
  }
  EXPECT_TRUE(oracle::within_sigmas(static_cast<double>(anti) / n, 1.0 / 3.0, n));
}

TEST(Substitution, ThreeHalvesEpsilonGivesErrorRateEpsilon) {
  Rng rng(76);
  const double eps = 0.03;
  const std::size_t n = 100000;
  const auto labels = substitute_pairs(n, 1.5 * eps, SubstitutionAttack{}.label_weights, rng);
  std::size_t parallel = 0;
  for (auto label : labels) {
    PairState pair = bell_pair(label);
    const auto axis = MeasurementAxis::random(rng);
    const auto o = measure_pair(pair, axis, axis, rng);
    parallel += o.a == o.b;
  }
  EXPECT_TRUE(oracle::within_sigmas(static_cast<double>(parallel) / n, eps, n));
}

// ---------------------------------------------------------------------------
// Coherent attacks

TEST(CoherentAttack, Validation) {
  EXPECT_THROW(CoherentAttack(7, 1, CVector::Unit(1 << 14, 0)), std::invalid_argument);
  EXPECT_THROW(CoherentAttack(1, 17, CVector::Unit(4 * 17, 0)), std::invalid_argument);
  EXPECT_THROW(CoherentAttack(1, 1, CVector::Ones(4)), std::invalid_argument);
  EXPECT_THROW(CoherentAttack(2, 1, CVector::Unit(4, 0)), std::invalid_argument);
  EXPECT_NO_THROW(CoherentAttack(6, 16, CVector::Unit(std::size_t{1} << 16, 5)));
}

TEST(PassingProbability, AllSingletsAlwaysPass) {
  Rng rng(81);
  for (std::size_t n = 1; n <= 4; ++n) {
    const std::vector<BellLabel> labels(n, 0);
    const auto attack = CoherentAttack::product(labels, random_vector(3, rng));
    for (int rep = 0; rep < 20; ++rep) {
      TestPlan plan;
      plan.indices = random_subset(n, 1 + rng.below(n), rng);
      for (std::size_t t = 0; t < plan.indices.size(); ++t) plan.axes.push_back(MeasurementAxis::random(rng));
      EXPECT_NEAR(passing_probability(attack, plan), 1.0, 1e-12);
    }
  }
}

TEST(PassingProbability, MatchesBruteForceProjectors) {
  Rng rng(82);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 1 + rep % 3;
    const auto attack = random_attack(n, 2, rng);
    TestPlan plan;
    plan.indices = random_subset(n, 1 + rng.below(n), rng);
    for (std::size_t t = 0; t < plan.indices.size(); ++t) plan.axes.push_back(MeasurementAxis::random(rng));
    plan.accept = rep % 2 ? AcceptanceRange{0, 1} : AcceptanceRange::strict();
    EXPECT_NEAR(passing_probability(attack, plan), brute_force_pass(attack, plan), 1e-10);
  }
}

TEST(PassingProbability, SingleNonSingletAveraged) {
  Rng rng(83);
  const std::vector<BellLabel> labels{0, 2, 0, 0};
  const auto attack = CoherentAttack::product(labels, CVector::Ones(1));
  const auto avg = averaged_passing_probability(attack, 2, AcceptanceRange::strict(), 20000, rng);
  const double expected = 1.0 - (2.0 / 3.0) * (2.0 / 4.0);
  EXPECT_NEAR(averaged_pass_oracle(attack, 2, AcceptanceRange::strict()), expected, 1e-12);
  EXPECT_NEAR(avg.mean, expected, 3.0 * avg.standard_error);
}

TEST(PassingProbability, SuperpositionCrossTermsVanishOnAverage) {
  Rng rng(84);
  CVector amps = CVector::Zero(256);
  amps(0) = 1.0 / std::sqrt(2.0);
  amps(1 * 64 + 2 * 16 + 3 * 4 + 1) = 1.0 / std::sqrt(2.0);
  const CoherentAttack attack(4, 1, amps);
  const double expected = 0.5 + 0.5 * std::pow(1.0 / 3.0, 4);
  const auto avg = averaged_passing_probability(attack, 4, AcceptanceRange::strict(), 20000, rng);
  EXPECT_NEAR(avg.mean, expected, 3.0 * avg.standard_error + 1e-12);
  EXPECT_NEAR(averaged_pass_oracle(attack, 4, AcceptanceRange::strict()), expected, 1e-12);
}

TEST(PassingProbability, AveragedMatchesAnalyticOracleForRandomStates) {
  Rng rng(85);
  for (int rep = 0; rep < 6; ++rep) {
    const std::size_t n = 2 + rep % 2;
    const auto attack = random_attack(n, 2, rng);
    const std::size_t m = 1 + rep % n;
    const AcceptanceRange accept = rep % 3 == 0 ? AcceptanceRange{0, 1} : AcceptanceRange::strict();
    const auto avg = averaged_passing_probability(attack, m, accept, 4000, rng);
    EXPECT_NEAR(avg.mean, averaged_pass_oracle(attack, m, accept), 3.5 * avg.standard_error + 1e-12);
  }
}

TEST(PassingProbability, DecreasesWithTestedNonSinglets) {
  Rng rng(86);
  double previous = 1.0 + 1e-12;
  for (std::size_t k = 0; k <= 4; ++k) {
    std::vector<BellLabel> labels(4, 0);
    for (std::size_t i = 0; i < k; ++i) labels[i] = static_cast<BellLabel>(1 + i % 3);
    const auto attack = CoherentAttack::product(labels, CVector::Ones(1));
    const double exact = averaged_pass_oracle(attack, 4, AcceptanceRange::strict());
    EXPECT_NEAR(exact, std::pow(1.0 / 3.0, static_cast<double>(k)), 1e-12);
    const auto avg = averaged_passing_probability(attack, 4, AcceptanceRange::strict(), 6000, rng);
    EXPECT_NEAR(avg.mean, exact, 3.0 * avg.standard_error + 1e-12);
    EXPECT_LT(exact, previous);
    previous = exact;
  }
}

TEST(PassingProbability, PermutationInvariance) {
  const std::vector<std::vector<BellLabel>> perms{{2, 0, 3, 0}, {0, 2, 0, 3}, {3, 2, 0, 0}, {0, 0, 3, 2}};
  double first = -1.0;
  for (const auto& labels : perms) {
    Rng rng(87);
    const auto attack = CoherentAttack::product(labels, CVector::Ones(1));
    const double exact = averaged_pass_oracle(attack, 2, AcceptanceRange::strict());
    if (first < 0) first = exact;
    EXPECT_NEAR(exact, first, 1e-12);
    const auto avg = averaged_passing_probability(attack, 2, AcceptanceRange::strict(), 6000, rng);
    EXPECT_NEAR(avg.mean, first, 3.0 * avg.standard_error + 1e-12);
  }
}

TEST(ConditionalAncilla, DecoupledEveLearnsNothing) {
  Rng rng(88);
  const std::vector<BellLabel> labels{0, 0, 0};
  const auto attack = CoherentAttack::product(labels, random_vector(4, rng));
  TestPlan plan{{0, 2}, {MeasurementAxis::random(rng), MeasurementAxis::random(rng)}, AcceptanceRange::strict()};
  const auto rho = conditional_ancilla_state(attack, plan);
  EXPECT_NEAR(rho.entries().trace().real(), 1.0, 1e-9);
  EXPECT_NEAR(eve_info_bound(rho), 0.0, 1e-9);
}

TEST(ConditionalAncilla, TwoMarkersGiveOneBit) {
  // (|psi1 psi0>|0> + |psi0 psi1>|1>)/sqrt2 tested on z: both branches pass
  // with certainty and the conditional ancilla state is maximally mixed.
  CVector amps = CVector::Zero(16 * 2);
  amps((1 * 4 + 0) * 2 + 0) = 1.0 / std::sqrt(2.0);
  amps((0 * 4 + 1) * 2 + 1) = 1.0 / std::sqrt(2.0);
  const CoherentAttack attack(2, 2, amps);
  TestPlan plan{{0, 1}, {MeasurementAxis::z_axis(), MeasurementAxis::z_axis()}, AcceptanceRange::strict()};
  EXPECT_NEAR(passing_probability(attack, plan), 1.0, 1e-12);
  const auto rho = conditional_ancilla_state(attack, plan);
  EXPECT_LT((rho.entries() - CMatrix::Identity(2, 2) / 2.0).norm(), 1e-12);
  EXPECT_NEAR(eve_info_bound(rho), 1.0, 1e-9);
}

TEST(ConditionalAncilla, ValidForRandomAttacks) {
  Rng rng(89);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 1 + rep % 4, d = 1 + rep % 5;
    const auto attack = random_attack(n, d, rng);
    TestPlan plan;
    plan.indices = random_subset(n, 1 + rng.below(n), rng);
    for (std::size_t t = 0; t < plan.indices.size(); ++t) plan.axes.push_back(MeasurementAxis::random(rng));
    const auto rho = conditional_ancilla_state(attack, plan);
    EXPECT_NEAR(rho.entries().trace().real(), 1.0, 1e-9);
    EXPECT_LE(eve_info_bound(rho), std::log2(static_cast<double>(d)) + 1e-9);
  }
}

TEST(ConditionalAncilla, ZeroPassingProbabilityIsAnError) {
  const std::vector<BellLabel> labels{2};
  const auto attack = CoherentAttack::product(labels, CVector::Ones(1));
  TestPlan plan{{0}, {MeasurementAxis::z_axis()}, AcceptanceRange::strict()};
  EXPECT_NEAR(passing_probability(attack, plan), 0.0, 1e-15);
  EXPECT_THROW(conditional_ancilla_state(attack, plan), std::domain_error);
}

TEST(TestPlan, RejectsBadIndices) {
  const std::vector<BellLabel> labels{0, 0};
  const auto attack = CoherentAttack::product(labels, CVector::Ones(1));
  const auto z = MeasurementAxis::z_axis();
  EXPECT_THROW(passing_probability(attack, TestPlan{{0, 0}, {z, z}, {}}), std::invalid_argument);
  EXPECT_THROW(passing_probability(attack, TestPlan{{2}, {z}, {}}), std::invalid_argument);
  EXPECT_THROW(passing_probability(attack, TestPlan{{0}, {z, z}, {}}), std::invalid_argument);
}

TEST(Typicality, AllSingletsAtypical) {
  const std::vector<BellLabel> labels{0, 0, 0, 0};
  const auto split = typicality_split(CoherentAttack::product(labels, CVector::Ones(1)), 2);
  EXPECT_NEAR(split.atypical_weight, 1.0, 1e-12);
}

TEST(Typicality, UniformSuperpositionCount) {
  const CVector uniform = CVector::Constant(256, 1.0 / 16.0);
  const CoherentAttack attack(4, 1, uniform);
  // epsilon = 0.25 gives T = ceil(2) = 2
  const auto split = typicality_split(4, 0.25, attack.joint_state());
  EXPECT_EQ(split.threshold, 2u);
  EXPECT_NEAR(split.atypical_weight, 13.0 / 256.0, 1e-12);
  EXPECT_NEAR(split.typical_weight + split.atypical_weight, 1.0, 1e-9);
}

TEST(Typicality, InvariantUnderSimultaneousRotations) {
  Rng rng(90);
  const auto attack = random_attack(3, 2, rng);
  const auto before = typicality_split(3, 0.3, attack.joint_state());
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Eigen::Matrix2cd> rs{random_rotation(rng), random_rotation(rng), random_rotation(rng)};
    const auto after = typicality_split(3, 0.3, rotate_pairs(attack.joint_state(), rs));
    EXPECT_NEAR(after.atypical_weight, before.atypical_weight, 1e-9);
  }
}

TEST(Dilemma, TypicalBasisVectorsPassLessThanAllSinglets) {
  Rng rng(91);
  const std::size_t n = 5, t = typicality_threshold(n, 0.2);
  ASSERT_EQ(t, 2u);
  const std::vector<BellLabel> singlets(n, 0);
  const double reference =
      averaged_pass_oracle(CoherentAttack::product(singlets, CVector::Ones(1)), 3, AcceptanceRange::strict());
  EXPECT_NEAR(reference, 1.0, 1e-12);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<BellLabel> labels(n, 0);
    std::size_t k = 0;
    while (k < t) {
      for (auto& l : labels) l = static_cast<BellLabel>(rng.below(4));
      k = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](BellLabel l) { return l != 0; }));
    }
    const auto attack = CoherentAttack::product(labels, CVector::Ones(1));
    EXPECT_LT(averaged_pass_oracle(attack, 3, AcceptanceRange::strict()), reference);
    const auto avg = averaged_passing_probability(attack, 3, AcceptanceRange::strict(), 500, rng);
    EXPECT_LT(avg.mean, reference);
  }
}

// ---------------------------------------------------------------------------
// Text format

TEST(CoherentIo, ParseAndRoundTrip) {
  std::istringstream in(
      "# two-pair attack\n"
      "ancilla_dim 2\n"
      "00 0 0.6 0\n"
      "12 1 0 0.8   # comment\n");
  const auto attack = parse_coherent_attack(in);
  EXPECT_EQ(attack.n_pairs(), 2u);
  EXPECT_EQ(attack.ancilla_dim(), 2u);
  EXPECT_EQ(attack.bell_amplitudes()(0), Complex(0.6, 0.0));
  EXPECT_EQ(attack.bell_amplitudes()((1 * 4 + 2) * 2 + 1), Complex(0.0, 0.8));

  std::ostringstream out;
  write_coherent_attack(out, attack);
  std::istringstream again(out.str());
  EXPECT_EQ(parse_coherent_attack(again).bell_amplitudes(), attack.bell_amplitudes());
}

TEST(CoherentIo, RejectsBadInput) {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_coherent_attack(in);
  };
  EXPECT_THROW(parse("00 0 0.5 0\n"), std::invalid_argument);                  // unnormalized
  EXPECT_THROW(parse("00 0 1 0\n00 0 0 0\n"), std::invalid_argument);          // duplicate
  EXPECT_THROW(parse("04 0 1 0\n"), std::invalid_argument);                    // bad label
  EXPECT_THROW(parse("00 0 1 0\n000 0 0 0\n"), std::invalid_argument);         // length mismatch
  EXPECT_THROW(parse("ancilla_dim 1\n00 1 1 0\n"), std::invalid_argument);     // ancilla out of range
  EXPECT_THROW(parse("0000000 0 1 0\n"), std::invalid_argument);               // over the pair cap
  EXPECT_THROW(parse(""), std::invalid_argument);
  EXPECT_THROW(load_coherent_attack("/nonexistent/attack.txt"), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// No-cloning

TEST(NoCloning, RandomUnitaryIsUnitary) {
  Rng rng(92);
  for (std::size_t d : {1u, 2u, 5u, 8u}) {
    const CMatrix u = random_unitary(d, rng);
    EXPECT_LT((u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm(), 1e-12);
  }
}

TEST(NoCloning, SignalPreservingUnitaryYieldsNoInformation) {
  Rng rng(93);
  for (int rep = 0; rep < 20; ++rep) {
    const CVector init = random_vector(3, rng);
    const CMatrix u = signal_preserving_unitary(init, rng);
    EXPECT_LT((u.adjoint() * u - CMatrix::Identity(6, 6)).norm(), 1e-12);
    const Photon u1 = random_vector(2, rng), u2 = random_vector(2, rng);
    const auto out = evaluate_interaction(u1, u2, u, init);
    EXPECT_NEAR(out.ancilla_overlap, 1.0, 1e-9);
    EXPECT_NEAR(out.fidelity_deficit, 0.0, 1e-9);
    EXPECT_NEAR(out.information_bits, 0.0, 1e-9);
  }
}

TEST(NoCloning, InformationGainDisturbsSignals) {
  Rng rng(94);
  const Photon u1 = MeasurementAxis::z_axis().spinor(Spin::up);
  const Photon u2 = MeasurementAxis::x_axis().spinor(Spin::up);
  int informative = 0;
  for (int rep = 0; rep < 50; ++rep) {
    const CVector init = random_vector(2, rng);
    const auto out = evaluate_interaction(u1, u2, random_unitary(4, rng), init);
    if (out.information_bits < 0.01) continue;
    ++informative;
    EXPECT_GE(out.fidelity_deficit, 1e-6);
  }
  EXPECT_GT(informative, 10);
}

TEST(NoCloning, IdentityInteraction) {
  const Photon u1 = MeasurementAxis::z_axis().spinor(Spin::up);
  const Photon u2 = MeasurementAxis::x_axis().spinor(Spin::down);
  const auto out = evaluate_interaction(u1, u2, CMatrix::Identity(4, 4), CVector::Unit(2, 0));
  EXPECT_NEAR(out.ancilla_overlap, 1.0, 1e-12);
  EXPECT_NEAR(out.information_bits, 0.0, 1e-12);
  EXPECT_NEAR(out.fidelity_deficit, 0.0, 1e-12);
}

TEST(NoCloning, CnotCopiesAndDisturbs) {
  // CNOT onto |0>: perfect copy of the z basis, so the ancilla carries
  // information and the diagonal signal decoheres.
  CMatrix cnot = CMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
  const Photon u1 = MeasurementAxis::z_axis().spinor(Spin::up);
  const Photon u2 = MeasurementAxis::x_axis().spinor(Spin::up);
  const auto out = evaluate_interaction(u1, u2, cnot, CVector::Unit(2, 0));
  EXPECT_GT(out.information_bits, 0.1);
  EXPECT_NEAR(out.fidelity_deficit, 0.5, 1e-12);
}
