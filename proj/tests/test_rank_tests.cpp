#include <gtest/gtest.h>

#include <random>

#include "pairfuzz/stats/rank_tests.hpp"

using namespace pairfuzz::stats;

namespace {

// P(U >= observed) over every way of splitting the pooled values into
// groups of sizes n and m; U computed by pair counting.
double enumerated_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = a.size(), total = pooled.size();
  const double observed = mann_whitney_u(a, b);
  std::size_t hits = 0, splits = 0;
  for (unsigned mask = 0; mask < (1u << total); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
    std::vector<double> x, y;
    for (std::size_t t = 0; t < total; ++t) ((mask >> t) & 1 ? x : y).push_back(pooled[t]);
    ++splits;
    hits += mann_whitney_u(x, y) >= observed - 1e-9;
  }
  return static_cast<double>(hits) / static_cast<double>(splits);
}

}  // namespace

TEST(MannWhitney, HandExample) {
  const auto r = mann_whitney_one_sided({4, 5, 6}, {1, 2, 3});
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.u, 9);
  EXPECT_NEAR(r.p, 0.05, 1e-15);  // 1 of C(6,3) = 20 splits
  EXPECT_NEAR(mann_whitney_one_sided({1, 2, 3}, {4, 5, 6}).p, 1.0, 1e-15);
  EXPECT_EQ(mann_whitney_u({1, 2}, {2, 2}), 1.0);  // two ties count half each
}

TEST(MannWhitney, ExactEqualsEnumerationUpToFour) {
  std::mt19937 gen(3);
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t m = 1; m <= 4; ++m)
      for (int rep = 0; rep < 25; ++rep) {
        // a small value range forces frequent ties
        std::uniform_int_distribution<int> v(0, rep % 2 ? 3 : 100);
        std::vector<double> a(n), b(m);
        for (auto& x : a) x = v(gen);
        for (auto& x : b) x = v(gen);
        EXPECT_NEAR(mann_whitney_exact(a, b).p, enumerated_p(a, b), 1e-12) << n << 'x' << m << " rep " << rep;
      }
}

TEST(MannWhitney, NormalCloseToExactAtTen) {
  std::mt19937 gen(8);
  std::normal_distribution<double> z(0, 1);
  for (double shift : {0.0, 0.5, 1.0}) {
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<double> a(10), b(10);
      for (auto& x : a) x = z(gen) + shift;
      for (auto& x : b) x = z(gen);
      EXPECT_NEAR(mann_whitney_normal(a, b).p, mann_whitney_exact(a, b).p, 0.02);
    }
  }
}

TEST(MannWhitney, DispatchesOnSize) {
  std::vector<double> a(21, 1.0), b(20, 0.0);
  EXPECT_FALSE(mann_whitney_one_sided(a, b).exact);
  a.pop_back();
  EXPECT_TRUE(mann_whitney_one_sided(a, b).exact);
  EXPECT_EQ(mann_whitney_normal({1, 1}, {1, 1}).p, 1.0);  // all tied
  EXPECT_THROW(mann_whitney_one_sided({}, {1}), std::invalid_argument);
}

TEST(VarghaDelaney, BruteForcePairs) {
  std::mt19937 gen(5);
  for (int rep = 0; rep < 1000; ++rep) {
    std::uniform_int_distribution<std::size_t> size(1, 12);
    std::uniform_int_distribution<int> v(0, 6);
    std::vector<double> a(size(gen)), b(size(gen));
    for (auto& x : a) x = v(gen);
    for (auto& x : b) x = v(gen);
    double wins = 0;
    for (double x : a)
      for (double y : b) {
        if (x > y) wins += 1;
        if (x == y) wins += 0.5;
      }
    ASSERT_DOUBLE_EQ(vargha_delaney(a, b), wins / static_cast<double>(a.size() * b.size()));
  }
  EXPECT_EQ(vargha_delaney({3}, {3}), 0.5);
  EXPECT_EQ(vargha_delaney({4, 5}, {1}), 1.0);
}
