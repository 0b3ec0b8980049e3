#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pairfuzz/analysis.hpp"
#include "pairfuzz/campaign.hpp"

namespace fs = std::filesystem;
using namespace pairfuzz;

namespace {

// Config flags shared by the campaign subcommands. Values stay strings until
// the config file (if any) has been applied, so the command line wins.
struct ConfigFlags {
  std::string config_file;
  std::map<std::string, std::optional<std::string>> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "key = value config file")->check(CLI::ExistingFile);
    for (const auto& key : config_keys()) {
      auto& slot = values[std::string(key.name)];
      app->add_option("--" + std::string(key.name), slot, std::string(key.help));
    }
  }

  CampaignConfig resolve() const {
    CampaignConfig cfg;
    if (!config_file.empty()) apply_config_file(cfg, config_file);
    for (const auto& [name, value] : values)
      if (value) set_config_value(cfg, name, *value);
    return cfg;
  }
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void print_summary(const std::vector<TrialSummary>& rows) { std::cout << render_table(format_summary(rows)); }

void write_analysis(const AnalysisOutput& a, const fs::path& dir) {
  write_files(dir, a.files);
  write_files(dir, {{"report.txt", a.report}});
  std::cout << a.report;
}

int cmd_targets() {
  for (const auto& t : builtin_targets()) {
    std::cout << t->name() << "  edges=" << t->edge_count() << "  seeds=" << t->seeds().size();
    for (const auto& b : t->bugs()) std::cout << "  " << b.id;
    std::cout << '\n';
  }
  return 0;
}

int cmd_fuzz(const CampaignConfig& cfg) {
  cfg.validate();
  const auto rows = run_experiment({{std::string(to_string(cfg.strategy)), cfg}}, cfg.trials, cfg.out, cfg.jobs);
  print_summary(rows);
  return 0;
}

int cmd_experiment(const CampaignConfig& base, const std::string& strategies, const std::string& targets) {
  base.validate();
  std::vector<ExperimentArm> arms;
  const auto target_list = targets.empty() ? std::vector<std::string>{base.target} : split_list(targets);
  for (const auto& s : split_list(strategies))
    for (const auto& t : target_list) {
      CampaignConfig c = base;
      set_config_value(c, "strategy", s);
      c.target = t;
      c.validate();
      arms.push_back({s, c});
    }
  const auto rows = run_experiment(arms, base.trials, base.out, base.jobs);
  print_summary(rows);
  write_analysis(analyze_experiment(base.out), fs::path(base.out) / "analysis");
  return 0;
}

int cmd_collect(const CampaignConfig& cfg) {
  cfg.validate();
  std::vector<CollectSummary> rows;
  collect_dataset(cfg, cfg.out, &rows);
  std::cout << render_table(detail::read_text(fs::path(cfg.out) / "collect.csv"));
  return 0;
}

int cmd_ablate(CampaignConfig base) {
  base.validate();
  if (base.cross_matrix.empty()) {
    const fs::path donor = fs::path(base.out) / "donor_matrix.csv";
    std::cerr << "training cross-program matrix on " << donor_target(base.target) << " -> " << donor.string() << '\n';
    train_donor_matrix(base, donor);
    base.cross_matrix = donor.string();
  }
  const auto rows = run_experiment(ablation_arms(base, base.cross_matrix), base.trials, base.out, base.jobs);
  print_summary(rows);
  const AnalysisOutput a = analyze_experiment(base.out);
  write_analysis(a, fs::path(base.out) / "analysis");
  write_files(base.out, {{"ablation.csv", a.files.at("variants.csv")}});
  return 0;
}

int cmd_analyze(const std::vector<std::string>& dirs, const std::string& out) {
  std::vector<fs::path> collect_dirs;
  for (const auto& d : dirs) {
    if (classify_directory(d) == DirectoryKind::experiment)
      write_analysis(analyze_experiment(d), out.empty() ? fs::path(d) / "analysis" : fs::path(out) / fs::path(d).filename());
    else
      collect_dirs.push_back(d);
  }
  if (!collect_dirs.empty())
    write_analysis(analyze_collect(collect_dirs), out.empty() ? collect_dirs.front() / "analysis" : fs::path(out));
  return 0;
}

int cmd_seeds(const std::string& target, const std::string& dir) {
  write_seed_dir(*find_target(target), dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairfuzz: coverage-guided fuzzing with learned mutator-pair scheduling"};
  app.require_subcommand(1);

  auto* targets = app.add_subcommand("targets", "list built-in targets");

  ConfigFlags fuzz_flags, exp_flags, collect_flags, ablate_flags;
  auto* fuzz = app.add_subcommand("fuzz", "run trials of one strategy on one target");
  fuzz_flags.attach(fuzz);

  auto* experiment = app.add_subcommand("experiment", "run several strategies on several targets and compare them");
  exp_flags.attach(experiment);
  std::string strategies = "pairwise,random_matrix", target_list;
  experiment->add_option("--strategies", strategies, "comma-separated strategies");
  experiment->add_option("--targets", target_list, "comma-separated targets (default: --target)");

  auto* collect = app.add_subcommand("collect", "collect per-trial pair count matrices (training only)");
  collect_flags.attach(collect);

  auto* ablate = app.add_subcommand("ablate", "run the ablation variants on one target");
  ablate_flags.attach(ablate);

  auto* analyze = app.add_subcommand("analyze", "analyze experiment or collect directories");
  std::vector<std::string> analyze_dirs;
  std::string analyze_out;
  analyze->add_option("dirs", analyze_dirs, "experiment or collect directories")->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--out", analyze_out, "report directory (default: <dir>/analysis)");

  auto* seeds = app.add_subcommand("seeds", "write a target's built-in seeds as files");
  std::string seeds_target, seeds_dir;
  seeds->add_option("target", seeds_target)->required();
  seeds->add_option("dir", seeds_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*targets) return cmd_targets();
    if (*fuzz) return cmd_fuzz(fuzz_flags.resolve());
    if (*experiment) return cmd_experiment(exp_flags.resolve(), strategies, target_list);
    if (*collect) return cmd_collect(collect_flags.resolve());
    if (*ablate) return cmd_ablate(ablate_flags.resolve());
    if (*analyze) return cmd_analyze(analyze_dirs, analyze_out);
    if (*seeds) return cmd_seeds(seeds_target, seeds_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
