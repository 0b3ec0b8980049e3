#include <gtest/gtest.h>

#include "pairfuzz/corpus.hpp"
#include "pairfuzz/stats/special.hpp"

using namespace pairfuzz;

namespace {

Corpus corpus_of_lengths(std::initializer_list<std::size_t> lengths) {
  Corpus c;
  std::uint8_t tag = 0;
  for (auto n : lengths) c.add_if_new(Bytes(n, tag++), std::nullopt);
  return c;
}

}  // namespace

TEST(Corpus, RejectsByteIdenticalInputs) {
  Corpus c;
  EXPECT_TRUE(c.add_if_new({1, 2, 3}, std::nullopt));
  EXPECT_FALSE(c.add_if_new({1, 2, 3}, Provenance{0, {MutatorId(1)}}));
  EXPECT_TRUE(c.add_if_new({1, 2}, Provenance{0, {MutatorId(1)}}, 7));
  EXPECT_EQ(c.size(), 2u);
  EXPECT_TRUE(c.contains(Bytes{1, 2}));
  EXPECT_FALSE(c.contains(Bytes{2, 1}));
  EXPECT_FALSE(c[0].provenance.has_value());
  EXPECT_EQ(c[1].discovered_at, 7u);
  EXPECT_EQ(c[1].provenance->parent, 0u);
  EXPECT_EQ(c.view().size, 2u);
}

TEST(Corpus, CrashesAreKeptApart) {
  Corpus c;
  EXPECT_TRUE(c.add_crash({9}, "X1", 3));
  EXPECT_FALSE(c.add_crash({9}, "X1", 4));
  EXPECT_TRUE(c.add_crash({9, 9}, "X1", 5));
  EXPECT_EQ(c.crashes().size(), 2u);
  EXPECT_TRUE(c.empty());
}

TEST(Corpus, MedianLength) {
  EXPECT_EQ(Corpus().median_length(), 0.0);
  EXPECT_EQ(corpus_of_lengths({5}).median_length(), 5.0);
  EXPECT_EQ(corpus_of_lengths({8, 2, 4}).median_length(), 4.0);
  EXPECT_EQ(corpus_of_lengths({8, 2, 4, 1}).median_length(), 3.0);
}

TEST(Scheduler, SelectionWeightByHand) {
  SeedEntry e;
  e.input = Bytes(8);
  EXPECT_DOUBLE_EQ(selection_weight(e, 4.0), 0.5);
  e.times_selected = 3;
  EXPECT_DOUBLE_EQ(selection_weight(e, 4.0), 0.125);
  e.input = Bytes(2);
  EXPECT_DOUBLE_EQ(selection_weight(e, 4.0), 0.5);
}

TEST(Scheduler, SelectionBumpsCounter) {
  Corpus c = corpus_of_lengths({3});
  Rng rng(1);
  EXPECT_EQ(select_seed(c, rng), 0u);
  EXPECT_EQ(select_seed(c, rng), 0u);
  EXPECT_EQ(c[0].times_selected, 2u);
  Corpus empty;
  EXPECT_THROW(select_seed(empty, rng), std::logic_error);
}

// Lengths 2, 4, 8 with median 4 give weights 2, 1, 1/2 before any selection;
// a seed picked twice earlier has its weight divided by 3.
TEST(Scheduler, SelectionFrequenciesMatchWeights) {
  Corpus c = corpus_of_lengths({2, 4, 8, 4});
  c[3].input.push_back(0);  // lengths 2, 4, 8, 5; median 4.5
  c[1].times_selected = 2;
  const std::array<double, 4> w = {4.5 / 2, 4.5 / 4 / 3, 4.5 / 8, 4.5 / 5};
  const double total = w[0] + w[1] + w[2] + w[3];

  constexpr int kDraws = 200000;
  std::array<double, 4> observed{};
  Rng rng(42);
  for (int d = 0; d < kDraws; ++d) {
    const std::size_t before = c[1].times_selected;
    const std::size_t pick = select_seed(c, rng);
    observed[pick] += 1;
    // undo the bump so every draw sees the same weights
    --c[pick].times_selected;
    ASSERT_EQ(c[1].times_selected, before);
  }
  double chi2 = 0;
  for (int i = 0; i < 4; ++i) {
    const double expected = kDraws * w[i] / total;
    chi2 += (observed[i] - expected) * (observed[i] - expected) / expected;
  }
  EXPECT_GT(stats::chi2_sf(chi2, 3), 1e-4) << chi2;
}

TEST(Scheduler, EnergyRules) {
  SchedulerConfig cfg;
  SeedEntry e;
  EXPECT_EQ(assign_energy(e, cfg), 64);  // never selected
  e.productive_last_round = true;
  EXPECT_EQ(assign_energy(e, cfg), 64);
  e.productive_last_round = false;
  EXPECT_EQ(assign_energy(e, cfg), 16);
  cfg.base_energy = 10000;
  e.productive_last_round = true;
  EXPECT_EQ(assign_energy(e, cfg), 4096);
  cfg.base_energy = 40;
  e.productive_last_round = false;
  EXPECT_EQ(assign_energy(e, cfg), 16);  // 10 raised to the floor
}
