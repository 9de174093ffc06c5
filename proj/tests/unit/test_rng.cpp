#include <stream_kpca/rng.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace sk = stream_kpca;

TEST(Rng, SameSeedAndStreamRepeat) {
  sk::Rng a(42, "feature_map");
  sk::Rng b(42, "feature_map");
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsAreIndependentNames) {
  EXPECT_NE(sk::derive_seed(42, "feature_map"), sk::derive_seed(42, "nystrom/reservoir"));
  EXPECT_NE(sk::derive_seed(1, "x"), sk::derive_seed(2, "x"));
  sk::Rng a(42, "a");
  sk::Rng b(42, "b");
  EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(Rng, UniformRanges) {
  sk::Rng r(7, "u");
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform_open_closed();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_LT(lo, 1e-3);
  EXPECT_GT(hi, 1 - 1e-3);
}

TEST(Rng, NormalMoments) {
  sk::Rng r(8, "n");
  const int n = 200000;
  double s = 0;
  double s2 = 0;
  double s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 0.02);
  EXPECT_NEAR(s4 / n, 3.0, 0.1);
}

TEST(Rng, BelowIsUniformAndInRange) {
  sk::Rng r(9, "below");
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = r.below(7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * std::sqrt(n / 7.0));
  EXPECT_EQ(r.below(1), 0u);
}
