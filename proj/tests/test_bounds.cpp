#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qkdlab/adversary.hpp"
#include "qkdlab/bounds.hpp"
#include "qkdlab/errors.hpp"

using namespace qkdlab;

namespace {

double big_log2(const oracle::Big& v) {
  // log2 via the leading 53 bits
  const std::size_t bits = boost::multiprecision::msb(v) + 1;
  if (bits <= 60) return std::log2(v.convert_to<double>());
  const oracle::Big top = v >> (bits - 60);
  return std::log2(top.convert_to<double>()) + static_cast<double>(bits - 60);
}

oracle::Big l1_oracle(std::size_t n, std::size_t t, const std::vector<std::vector<oracle::Big>>& p) {
  oracle::Big sum = 0;
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = 0; b < t; ++b)
      for (std::size_t c = 0; c < t; ++c)
        if (a + b + c <= n) sum += p[n][a] * p[n - a][b] * p[n - a - b][c];
  return sum;
}

CVector random_vector(std::size_t dim, Rng& rng) {
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {rng.normal(), rng.normal()};
  return v.normalized();
}

}  // namespace

TEST(BinaryEntropy, Values) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_DOUBLE_EQ(binary_entropy(1.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.11), 0.49999, 1e-4);
  EXPECT_THROW(binary_entropy(-0.01), std::invalid_argument);
  EXPECT_THROW(binary_entropy(1.01), std::invalid_argument);
}

TEST(BinaryEntropy, ConcaveOnGrid) {
  const int k = 400;
  for (int i = 1; i < k; ++i) {
    const double x = static_cast<double>(i) / k, h = 1.0 / k;
    EXPECT_GE(binary_entropy(x), 0.5 * (binary_entropy(x - h) + binary_entropy(x + h)) - 1e-15);
  }
}

TEST(Binomial, MatchesPascal) {
  const auto p = oracle::pascal(120);
  for (std::size_t n = 0; n <= 120; n += 7)
    for (std::size_t k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), p[n][k]);
  EXPECT_EQ(binomial(5, 6), 0);
}

TEST(Log2Big, LargeValues) {
  EXPECT_EQ(log2_big(BigInt(1)), 0.0);
  EXPECT_TRUE(std::isinf(log2_big(BigInt(0))));
  EXPECT_NEAR(log2_big(BigInt(1) << 3000), 3000.0, 1e-9);
  EXPECT_NEAR(log2_big((BigInt(1) << 2000) * 3), 2000.0 + std::log2(3.0), 1e-9);
}

TEST(EntropyInequality, WorkedExamples) {
  const auto e = binomial_entropy_inequality(4, 2);
  EXPECT_NEAR(e.lhs_log2, std::log2(6.0), 1e-12);
  EXPECT_NEAR(e.rhs, 4.0, 1e-12);
  EXPECT_TRUE(e.holds);
  const auto z = binomial_entropy_inequality(10, 0);
  EXPECT_EQ(z.lhs_log2, 0.0);
  EXPECT_EQ(z.rhs, 0.0);
  EXPECT_TRUE(z.holds);
}

TEST(EntropyInequality, ExhaustiveUpTo200) {
  const auto p = oracle::pascal(200);
  for (std::size_t n = 1; n <= 200; ++n) {
    for (std::size_t r = 0; r <= n; ++r) {
      const auto e = binomial_entropy_inequality(n, r);
      ASSERT_TRUE(e.holds) << n << " " << r;
      ASSERT_NEAR(e.lhs_log2, big_log2(p[n][r]), 1e-9);
      ASSERT_LE(e.lhs_log2, e.rhs + 1e-9);
    }
  }
}

TEST(AtypicalCount, HandCounts) {
  EXPECT_EQ(atypical_count_exact(7, 1), 1);
  EXPECT_EQ(atypical_count_exact(4, 2), 13);
  EXPECT_EQ(atypical_count_exact(20, 3), 1771);
  EXPECT_EQ(atypical_count_exact(100, 2), 301);
  EXPECT_EQ(atypical_count_exact(50, 2), 151);
  EXPECT_EQ(atypical_count_exact(6, 0), 0);
  // T = N + 1 counts every vector: 4^N.
  EXPECT_EQ(atypical_count_exact(6, 7), 4096);
}

TEST(AtypicalCount, MatchesEnumeration) {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::size_t t = 0; t <= n + 1; ++t) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < (std::size_t{1} << (2 * n)); ++i) count += non_singlet_count(i, n) < t;
      EXPECT_EQ(atypical_count_exact(n, t), count);
    }
  }
}

TEST(Threshold, Ceiling) {
  EXPECT_EQ(typicality_threshold(100, 0.01), 2u);
  EXPECT_EQ(typicality_threshold(4, 0.125), 1u);
  EXPECT_EQ(typicality_threshold(4, 0.13), 2u);
  EXPECT_EQ(typicality_threshold(1000, 0.015), 30u);
}

TEST(Chain, WorkedExampleN100) {
  const auto r = atypical_dim_chain(100, 0.01);
  EXPECT_EQ(r.threshold, 2u);
  EXPECT_EQ(r.exact_atypical_count, 301);
  // 1 + 3*100 + 3*100*99 + 100*99*98
  EXPECT_EQ(r.l1, 1000201);
  const auto p = oracle::pascal(100);
  EXPECT_EQ(r.l1, l1_oracle(100, 2, p));
  EXPECT_EQ(r.l2, 8 * p[100][2] * p[100][2] * p[100][2]);
  EXPECT_TRUE(r.ordered());
}

TEST(Chain, WorkedExampleN50) {
  const auto r = atypical_dim_chain(50, 0.02);
  EXPECT_EQ(r.threshold, 2u);
  EXPECT_EQ(r.exact_atypical_count, 151);
  EXPECT_LE(r.exact_atypical_count, r.l1);
  EXPECT_TRUE(r.ordered());
}

TEST(Chain, L1MatchesTripleSum) {
  const auto p = oracle::pascal(120);
  for (std::size_t n : {2u, 5u, 17u, 40u, 80u, 120u}) {
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.24}) {
      if (static_cast<double>(n) * eps < 0.5 || 2 * typicality_threshold(n, eps) > n) continue;
      const auto r = atypical_dim_chain(n, eps);
      EXPECT_EQ(r.l1, l1_oracle(n, r.threshold, p)) << n << " " << eps;
      EXPECT_NEAR(r.log2_l2, big_log2(r.threshold * r.threshold * r.threshold * p[n][r.threshold] *
                                      p[n][r.threshold] * p[n][r.threshold]),
                  1e-9);
    }
  }
}

TEST(Chain, OrderedAcrossGrid) {
  for (std::size_t n = 2; n <= 500; n += 6) {
    for (int i = 1; i < 25; ++i) {
      const double eps = 0.01 * i;
      if (static_cast<double>(n) * eps < 0.5) continue;
      const auto t = typicality_threshold(n, eps);
      if (2 * t > n) {
        EXPECT_THROW(atypical_dim_chain(n, eps), RegimeError);
        continue;
      }
      const auto r = atypical_dim_chain(n, eps);
      EXPECT_TRUE(r.ordered()) << n << " " << eps;
      const double h = binary_entropy(r.epsilon_eff);
      EXPECT_NEAR(r.mu, 3.0 * std::log2(std::pow(static_cast<double>(t), 3)) / n, 1e-12);
      EXPECT_NEAR(r.log2_l4, n * (6.0 * h + r.mu), 1e-9);
      EXPECT_NEAR(r.log2_l5, -static_cast<double>(n) * r.implied_k * r.epsilon_eff * std::log2(r.epsilon_eff),
                  1e-9 * std::max(1.0, r.log2_l5));
    }
  }
}

TEST(Chain, ExponentiallySmallerThanFullSpace) {
  const auto r = atypical_dim_chain(1000, 0.01);
  EXPECT_GT(r.margin_bits(), 400.0);
  EXPECT_LT(r.log2_l5, 0.6 * 1000);
}

TEST(Chain, RegimeErrors) {
  try {
    atypical_dim_chain(100, 0.25);
    FAIL();
  } catch (const RegimeError& e) {
    EXPECT_EQ(e.parameter(), "epsilon");
  }
  try {
    atypical_dim_chain(10, 0.01);
    FAIL();
  } catch (const RegimeError& e) {
    EXPECT_EQ(e.parameter(), "n");
  }
  EXPECT_THROW(atypical_dim_chain(100, 0.0), RegimeError);
}

TEST(EveInfoUpper, Examples) {
  EXPECT_NEAR(eve_info_upper(4, 0.13, 0.0), std::log2(13.0), 1e-12);
  EXPECT_NEAR(eve_info_upper(atypical_dim_chain(4, 0.13), 0.0), std::log2(13.0), 1e-12);
  EXPECT_NEAR(eve_info_upper(4, 0.125, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(eve_info_upper(1000, 1e-7, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(eve_info_upper(100, 0.01, 0.1), std::log2(301.0) + 10.0, 1e-9);
}

TEST(EveInfoUpper, DominatesConformingCoherentAttacks) {
  Rng rng(11);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 2 + rep % 3;
    const double eps = rep % 2 ? 0.13 : 0.2;
    const std::size_t t = typicality_threshold(n, eps), d = 16;
    CVector amps = CVector::Zero(static_cast<Eigen::Index>((std::size_t{1} << (2 * n)) * d));
    for (std::size_t i = 0; i < (std::size_t{1} << (2 * n)); ++i)
      if (non_singlet_count(i, n) < t)
        amps.segment(static_cast<Eigen::Index>(i * d), static_cast<Eigen::Index>(d)) = random_vector(d, rng);
    amps.normalize();
    const CoherentAttack attack(n, d, amps);
    TestPlan plan;
    plan.indices = random_subset(n, 1 + rng.below(n), rng);
    for (std::size_t k = 0; k < plan.indices.size(); ++k) plan.axes.push_back(MeasurementAxis::random(rng));
    plan.accept = AcceptanceRange{0, static_cast<std::int64_t>(plan.indices.size())};
    const double bound = eve_info_upper(n, eps, 0.0);
    EXPECT_LE(eve_info_bound(conditional_ancilla_state(attack, plan)), bound + 1e-9);
  }
}

TEST(SecrecyBound, Values) {
  EXPECT_EQ(secrecy_lower_bound(0.0, 10.0), 1.0);
  EXPECT_NEAR(secrecy_lower_bound(0.01, 10.0), 1.0 + 0.1 * std::log2(0.01), 1e-12);
  EXPECT_EQ(secrecy_lower_bound(0.1, 10.0), 0.0);
  EXPECT_GT(secrecy_lower_bound(1e-9, 10.0), 0.999);
  EXPECT_THROW(secrecy_lower_bound(0.25, 10.0), RegimeError);
  EXPECT_THROW(secrecy_lower_bound(-0.01, 10.0), RegimeError);
  EXPECT_THROW(secrecy_lower_bound(0.01, 0.0), ConfigError);
}

TEST(SecrecyBound, ClampAtRoot) {
  double lo = 1e-6, hi = 0.1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 + 10.0 * mid * std::log2(mid) > 0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(secrecy_lower_bound(lo, 10.0), 0.0, 1e-9);
  EXPECT_EQ(secrecy_lower_bound(hi + 1e-6, 10.0), 0.0);
}

TEST(SecrecyBound, MonotoneAndRatioIsKprime) {
  double previous = 1.0;
  for (int i = 1; i < 250; ++i) {
    const double eps = 0.001 * i;
    const double c = secrecy_lower_bound(eps, 2.0);
    EXPECT_LE(c, previous + 1e-15);
    previous = c;
    if (c > 0.0) EXPECT_NEAR((1.0 - c) / (-eps * std::log2(eps)), 2.0, 1e-9);
  }
}

TEST(Mixture, HalfAndHalf) {
  Rng rng(12);
  const auto m = mixture_error_rate(0.0, 0.5, 0.5, 0.5, 40000, rng);
  EXPECT_DOUBLE_EQ(m.expected_rate, 0.25);
  EXPECT_TRUE(oracle::within_sigmas(m.observed_rate, 0.25, 40000));
  EXPECT_TRUE(m.within_3sigma);
}

TEST(Mixture, DegenerateCases) {
  Rng rng(13);
  const auto a = mixture_error_rate(0.05, 0.2, 1.0, 0.0, 20000, rng);
  EXPECT_DOUBLE_EQ(a.expected_rate, 0.05);
  EXPECT_TRUE(oracle::within_sigmas(a.observed_rate, 0.05, 20000));
  const auto same = mixture_error_rate(0.1, 0.1, 0.3, 0.7, 20000, rng);
  EXPECT_NEAR(same.expected_rate, 0.1, 1e-15);
  EXPECT_TRUE(oracle::within_sigmas(same.observed_rate, 0.1, 20000));
  ASSERT_TRUE(same.bound_at_mixture.has_value());
  EXPECT_NEAR(*same.bound_at_mixture, *same.mixed_bound, 1e-12);
  EXPECT_THROW(mixture_error_rate(0.1, 0.1, 0.5, 0.6, 100, rng), std::invalid_argument);
}
