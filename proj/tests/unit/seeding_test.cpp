#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "gymkit/seeding.hpp"

using gymkit::Rng;

// Reference outputs from tests/oracles/reference_values.py.
TEST(SplitMix64, FirstOutputsForSeedZero) {
  gymkit::SplitMix64 sm(0);
  EXPECT_EQ(sm.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(sm.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(sm.next(), 0x06c45d188009454fULL);
  EXPECT_EQ(sm.next(), 0xf88bb8a8724c81ecULL);
}

TEST(Seeding, ChildSeedsAreTheSplitMixStream) {
  const auto seeds = gymkit::derive_child_seeds(42, 8);
  const std::vector<std::uint64_t> expected{0xbdd732262feb6e95ULL, 0x28efe333b266f103ULL, 0x47526757130f9f52ULL,
                                            0x581ce1ff0e4ae394ULL, 0x09bc585a244823f2ULL, 0xde4431fa3c80db06ULL,
                                            0x37e9671c45376d5dULL, 0xccf635ee9e9e2fa4ULL};
  EXPECT_EQ(seeds, expected);
}

TEST(Seeding, ChildSeedsArePrefixStable) {
  const auto four = gymkit::derive_child_seeds(9, 4);
  const auto eight = gymkit::derive_child_seeds(9, 8);
  EXPECT_TRUE(std::equal(four.begin(), four.end(), eight.begin()));
  EXPECT_TRUE(gymkit::derive_child_seeds(9, 0).empty());
}

TEST(Xoshiro, ReferenceStreams) {
  struct Case {
    std::uint64_t seed;
    std::array<std::uint64_t, 4> out;
  };
  const Case cases[] = {
      {0, {0x99ec5f36cb75f2b4ULL, 0xbf6e1f784956452aULL, 0x1a5f849d4933e6e0ULL, 0x6aa594f1262d2d2cULL}},
      {1, {0xb3f2af6d0fc710c5ULL, 0x853b559647364ceaULL, 0x92f89756082a4514ULL, 0x642e1c7bc266a3a7ULL}},
      {42, {0x15780b2e0c2ec716ULL, 0x6104d9866d113a7eULL, 0xae17533239e499a1ULL, 0xecb8ad4703b360a1ULL}},
  };
  for (const auto& c : cases) {
    Rng rng(c.seed);
    for (auto expected : c.out) EXPECT_EQ(rng.next(), expected) << "seed " << c.seed;
  }
}

TEST(Xoshiro, DoubleUsesTop53Bits) {
  Rng rng(7);
  EXPECT_EQ(rng.next_double(), 0.7005764821796896);
}

TEST(Rng, EqualSeedsGiveEqualStreams) {
  Rng a(123), b(123), c(124);
  EXPECT_EQ(a, b);
  EXPECT_FALSE(a == c);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, UnitDoublesStayInHalfOpenInterval) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.next_double();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NextBelowCoversRangeUniformly) {
  Rng rng(11);
  std::array<int, 5> counts{};
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) {
    const auto k = rng.next_below(5);
    ASSERT_LT(k, 5u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c / double(draws), 0.2, 0.01);
}

TEST(Rng, IntegerIsInclusive) {
  Rng rng(3);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto k = rng.integer(-2, 2);
    ASSERT_GE(k, -2);
    ASSERT_LE(k, 2);
    seen.insert(k);
  }
  EXPECT_EQ(seen.size(), 5u);
}

TEST(Rng, NormalMoments) {
  Rng rng(17);
  double sum = 0, sq = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.03);
  EXPECT_NEAR(sq / n, 1.0, 0.03);
}

TEST(Rng, ExponentialMean) {
  Rng rng(19);
  double sum = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.exponential();
    ASSERT_GE(x, 0.0);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 1.0, 0.03);
}
