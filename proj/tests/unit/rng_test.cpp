#include "sbmcv/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

using namespace sbmcv;

TEST(Rng, Uniform01StaysInUnitInterval) {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, UniformBelowIsUnbiased) {
  Rng rng(11);
  std::vector<int> counts(6, 0);
  for (int i = 0; i < 60000; ++i) ++counts[uniform_below(rng, 6)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
  EXPECT_THROW(uniform_below(rng, 0), std::invalid_argument);
}

TEST(Rng, ShuffleIsAPermutationAndSeeded) {
  std::vector<int> a(50), b(50);
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(3), r2(3);
  shuffle(std::span<int>(a), r1);
  shuffle(std::span<int>(b), r2);
  EXPECT_EQ(a, b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(Rng, DeriveSeedIsPureAndSeparatesCoordinates) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {1ULL, 2ULL})
    for (std::uint64_t a = 0; a < 20; ++a)
      for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(master, {a, b}));
  EXPECT_EQ(seen.size(), 800u);
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {0}), derive_seed(1, {0, 0}));
}

TEST(Rng, HashStringIsFnv1a) {
  EXPECT_EQ(hash_string(""), 14695981039346656037ULL);
  EXPECT_EQ(hash_string("a"), 0xaf63dc4c8601ec8cULL);
}
