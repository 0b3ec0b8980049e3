#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "pairfuzz/analysis.hpp"
#include "pairfuzz/campaign.hpp"

using namespace pairfuzz;
namespace fs = std::filesystem;

TEST(Config, Defaults) {
  const CampaignConfig c;
  EXPECT_EQ(c.strategy, StrategyMode::pairwise);
  EXPECT_EQ(c.first_mutator, FirstMutatorMode::uniform);
  EXPECT_EQ(c.length_mode, LengthMode::bandit);
  EXPECT_DOUBLE_EQ(c.t_train_fraction, 1.0 / 24);
  EXPECT_EQ(c.budget, 2'000'000u);
  EXPECT_EQ(c.scheduler.base_energy, 64);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, SetValues) {
  CampaignConfig c;
  set_config_value(c, "t_train_fraction", "1/48");
  EXPECT_DOUBLE_EQ(c.t_train_fraction, 1.0 / 48);
  set_config_value(c, "t_train_fraction", " 0.1 ");
  EXPECT_DOUBLE_EQ(c.t_train_fraction, 0.1);
  set_config_value(c, "strategy", "random_matrix");
  EXPECT_EQ(c.strategy, StrategyMode::random_matrix);
  set_config_value(c, "length_mode", "default");
  EXPECT_EQ(c.length_mode, LengthMode::fixed_default);
  set_config_value(c, "hitcount_buckets", "yes");
  EXPECT_TRUE(c.hitcount_buckets);
  set_config_value(c, "budget", "50000");
  EXPECT_EQ(c.budget, 50000u);
}

TEST(Config, RejectsBadValues) {
  CampaignConfig c;
  EXPECT_THROW(set_config_value(c, "nope", "1"), ConfigError);
  EXPECT_THROW(set_config_value(c, "budget", "12x"), ConfigError);
  EXPECT_THROW(set_config_value(c, "budget", "-5"), ConfigError);
  EXPECT_THROW(set_config_value(c, "strategy", "markov"), ConfigError);
  EXPECT_THROW(set_config_value(c, "t_train_fraction", "1/0"), ConfigError);
  EXPECT_THROW(set_config_value(c, "save_corpus", "maybe"), ConfigError);
}

TEST(Config, ValidateRanges) {
  auto broken = [](auto tweak) {
    CampaignConfig c;
    tweak(c);
    return c;
  };
  EXPECT_THROW(broken([](auto& c) { c.budget = 9999; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.trials = 0; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.t_train_fraction = 0; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.t_train_fraction = 1; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.strategy = StrategyMode::cross_program; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.scheduler.min_energy = 5000; }).validate(), ConfigError);
  EXPECT_THROW(broken([](auto& c) { c.bandit_exploit_probability = 1.5; }).validate(), ConfigError);
}

TEST(Config, TextWithCommentsAndLineNumbers) {
  CampaignConfig c;
  apply_config_text(c, "# campaign\n\ntarget = arith\n  trials=3\nfirst_mutator = weighted\n");
  EXPECT_EQ(c.target, "arith");
  EXPECT_EQ(c.trials, 3);
  EXPECT_EQ(c.first_mutator, FirstMutatorMode::weighted);
  try {
    apply_config_text(c, "target = arith\nbudget\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Config, FormatRoundTrips) {
  CampaignConfig c;
  apply_config_text(c, "target = strictfmt\nt_train_fraction = 1/12\nseed = 77\nmax_energy = 512\ndict = d.txt\n");
  CampaignConfig back;
  apply_config_text(back, format_config(c));
  EXPECT_EQ(format_config(back), format_config(c));
  EXPECT_DOUBLE_EQ(back.t_train_fraction, 1.0 / 12);
  EXPECT_EQ(back.dict, "d.txt");
}

TEST(Config, PrepareTrialReportsConfigErrors) {
  CampaignConfig c;
  c.target = "nope";
  EXPECT_THROW(prepare_trial(c), ConfigError);
  c.target = "arith";
  c.seed_dir = "/nonexistent/seeds";
  EXPECT_THROW(prepare_trial(c), ConfigError);
  c.seed_dir.clear();
  c.strategy = StrategyMode::cross_program;
  c.cross_matrix = "/nonexistent/matrix.csv";
  EXPECT_THROW(prepare_trial(c), ConfigError);
}

// Command line beats the config file, which beats the defaults.
TEST(Cli, Precedence) {
  const fs::path dir = fs::temp_directory_path() / "pairfuzz_cli_precedence";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "c.conf");
    cfg << "target = arith\nbudget = 20000\nseed = 5\n";
  }
  const std::string cmd = std::string(PAIRFUZZ_CLI) + " fuzz --config " + (dir / "c.conf").string() +
                          " --budget 10000 --out " + (dir / "out").string() + " > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  CampaignConfig got;
  const auto meta = detail::read_text(dir / "out" / "pairwise" / "arith" / "trial_0" / "meta.txt");
  apply_config_text(got, meta.substr(0, meta.find("# results")));
  EXPECT_EQ(got.target, "arith");
  EXPECT_EQ(got.budget, 10000u);
  EXPECT_EQ(got.seed, 6u);  // trial 0 runs with master + 1
  EXPECT_EQ(got.strategy, StrategyMode::pairwise);

  const std::string bad = std::string(PAIRFUZZ_CLI) + " fuzz --budget 10 --out " + (dir / "x").string() + " 2> /dev/null";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
  fs::remove_all(dir);
}
