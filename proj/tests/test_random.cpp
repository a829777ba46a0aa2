#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "auction/random.hpp"

using namespace auction;

TEST(Seeds, DistinctAcrossCellsAndTrials) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t cell = 0; cell < 50; ++cell) {
    for (std::uint64_t trial = 0; trial < 50; ++trial) seen.insert(trial_seed(1, cell, trial));
  }
  EXPECT_EQ(seen.size(), 2500u);
  EXPECT_NE(trial_seed(1, 0, 0), trial_seed(2, 0, 0));
  EXPECT_EQ(trial_seed(7, 3, 4), derive_seed(derive_seed(7, 3), 4));
}

TEST(Rng, Deterministic) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.bits();
    EXPECT_EQ(x, b.bits());
    differs |= x != c.bits();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, Moments) {
  Rng r(5);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  int coins = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
    coins += r.coin();
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
  EXPECT_LT(std::abs(coins), 4 * std::sqrt(n));
}

TEST(Rng, BernoulliEdges) {
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_TRUE(r.bernoulli(1.0));
    EXPECT_FALSE(r.bernoulli(0.0));
  }
}
