#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "qkdlab/rng.hpp"

using qkdlab::PhiloxCounter;
using qkdlab::Rng;

// Known-answer vectors published with Random123 (kat_vectors, philox4x32_10).
TEST(Philox, KnownAnswerZero) {
  const PhiloxCounter out = qkdlab::philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const PhiloxCounter out = qkdlab::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                                  {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  const PhiloxCounter out =
      qkdlab::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, FirstOutputsComeFromBlockZero) {
  Rng rng(0);
  const PhiloxCounter block = qkdlab::philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(rng(), (std::uint64_t{block[1]} << 32) | block[0]);
  EXPECT_EQ(rng(), (std::uint64_t{block[3]} << 32) | block[2]);
}

TEST(Rng, SameSeedAndStreamRepeat) {
  Rng a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs |= x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, SplitLeavesParentUntouched) {
  Rng parent(5);
  Rng reference(5);
  Rng child = parent.split(3);
  EXPECT_NE(child.stream(), parent.stream());
  EXPECT_EQ(parent(), reference());
  EXPECT_EQ(parent.split(3)(), Rng(5).split(3)());
}

TEST(Rng, TrialStreamsAreDistinct) {
  std::set<std::uint64_t> first;
  for (std::uint64_t t = 0; t < 1000; ++t) first.insert(qkdlab::trial_stream(42, t)());
  EXPECT_EQ(first.size(), 1000u);
}

TEST(Rng, UniformRange) {
  Rng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, BelowIsUniform) {
  Rng rng(2);
  const std::uint64_t k = 7;
  const int n = 70000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    const auto x = rng.below(k);
    ASSERT_LT(x, k);
    ++counts[x];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // chi-square, 6 dof, p = 0.001
}

TEST(Rng, NormalMoments) {
  Rng rng(3);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 3.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 3.0 * std::sqrt(2.0 / n));
}

TEST(RandomSubset, SortedDistinctAndBounded) {
  Rng rng(4);
  for (int rep = 0; rep < 100; ++rep) {
    const auto s = qkdlab::random_subset(50, 17, rng);
    ASSERT_EQ(s.size(), 17u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<std::size_t>(s.begin(), s.end()).size(), 17u);
    EXPECT_LT(s.back(), 50u);
  }
  EXPECT_THROW(qkdlab::random_subset(3, 4, rng), std::invalid_argument);
  EXPECT_EQ(qkdlab::random_subset(5, 5, rng), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(RandomPermutation, IsPermutation) {
  Rng rng(6);
  auto p = qkdlab::random_permutation(1000, rng);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], i);
}
