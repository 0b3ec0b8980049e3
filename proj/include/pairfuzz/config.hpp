#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pairfuzz/bytes.hpp"
#include "pairfuzz/corpus.hpp"
#include "pairfuzz/strategy.hpp"

namespace pairfuzz {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kMinBudget = 10'000;

struct CampaignConfig {
  std::string target = "chunkfmt";
  StrategyMode strategy = StrategyMode::pairwise;
  FirstMutatorMode first_mutator = FirstMutatorMode::uniform;
  LengthMode length_mode = LengthMode::bandit;
  double t_train_fraction = 1.0 / 24.0;
  std::string cross_matrix;
  std::uint64_t seed = 1;
  std::uint64_t budget = 2'000'000;
  double budget_seconds = 0;  // wall-clock cap, 0 = executions only
  int trials = 1;
  std::string out = "out";
  std::size_t max_input_size = kDefaultMaxInputSize;
  std::string dict;
  std::string seed_dir;
  bool hitcount_buckets = false;
  SchedulerConfig scheduler;
  bool save_corpus = false;
  bool training_only = false;
  int jobs = 1;
  double bandit_explore_fraction = 1.0 / 23.0;
  double bandit_exploit_probability = 0.5;

  void validate() const {
    if (budget < kMinBudget) throw ConfigError("budget must be at least " + std::to_string(kMinBudget));
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (jobs < 1) throw ConfigError("jobs must be at least 1");
    if (!(t_train_fraction > 0 && t_train_fraction < 1)) throw ConfigError("t_train_fraction must lie in (0, 1)");
    if (strategy == StrategyMode::cross_program && cross_matrix.empty())
      throw ConfigError("strategy cross_program needs cross_matrix");
    if (max_input_size < 1) throw ConfigError("max_input_size must be positive");
    if (scheduler.min_energy < 1 || scheduler.min_energy > scheduler.max_energy)
      throw ConfigError("need 1 <= min_energy <= max_energy");
    if (!(scheduler.base_energy > 0) || !(scheduler.unproductive_factor > 0))
      throw ConfigError("base_energy and unproductive_factor must be positive");
    if (!(bandit_exploit_probability >= 0 && bandit_exploit_probability <= 1))
      throw ConfigError("bandit_exploit_probability must lie in [0, 1]");
    if (budget_seconds < 0) throw ConfigError("budget_seconds must be nonnegative");
  }
};

namespace detail {

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ConfigError(std::string(key) + ": not a number: '" + std::string(text) + "'");
  return value;
}

// Accepts "0.05" as well as "1/24".
inline double parse_fraction(std::string_view key, std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_number<double>(key, text);
  const double num = parse_number<double>(key, text.substr(0, slash));
  const double den = parse_number<double>(key, text.substr(slash + 1));
  if (den == 0) throw ConfigError(std::string(key) + ": zero denominator");
  return num / den;
}

inline bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(text) + "'");
}

template <typename Fn>
auto rethrow_as_config(std::string_view key, Fn fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

struct ConfigKey {
  std::string_view name;
  std::string_view help;
  std::function<void(CampaignConfig&, std::string_view)> set;
  std::function<std::string(const CampaignConfig&)> get;
};

// Every configurable key. The CLI builds one flag per entry.
inline const std::vector<ConfigKey>& config_keys() {
  using detail::format_double;
  using detail::parse_bool;
  using detail::parse_fraction;
  using detail::parse_number;
  using C = CampaignConfig;
  static const std::vector<ConfigKey> keys = {
      {"target", "built-in target name", [](C& c, std::string_view v) { c.target = v; },
       [](const C& c) { return c.target; }},
      {"strategy", "fixed|isolated|pairwise|pairwise_p2|random_matrix|cross_program",
       [](C& c, std::string_view v) { c.strategy = detail::rethrow_as_config("strategy", [&] { return parse_strategy_mode(v); }); },
       [](const C& c) { return std::string(to_string(c.strategy)); }},
      {"first_mutator", "uniform|weighted",
       [](C& c, std::string_view v) {
         c.first_mutator = detail::rethrow_as_config("first_mutator", [&] { return parse_first_mutator_mode(v); });
       },
       [](const C& c) { return std::string(to_string(c.first_mutator)); }},
      {"length_mode", "bandit|default",
       [](C& c, std::string_view v) { c.length_mode = detail::rethrow_as_config("length_mode", [&] { return parse_length_mode(v); }); },
       [](const C& c) { return std::string(to_string(c.length_mode)); }},
      {"t_train_fraction", "share of the budget spent training, e.g. 1/24",
       [](C& c, std::string_view v) { c.t_train_fraction = parse_fraction("t_train_fraction", v); },
       [](const C& c) { return format_double(c.t_train_fraction); }},
      {"cross_matrix", "count matrix CSV for cross_program", [](C& c, std::string_view v) { c.cross_matrix = v; },
       [](const C& c) { return c.cross_matrix; }},
      {"seed", "master rng seed", [](C& c, std::string_view v) { c.seed = parse_number<std::uint64_t>("seed", v); },
       [](const C& c) { return std::to_string(c.seed); }},
      {"budget", "target executions per trial",
       [](C& c, std::string_view v) { c.budget = parse_number<std::uint64_t>("budget", v); },
       [](const C& c) { return std::to_string(c.budget); }},
      {"budget_seconds", "optional wall-clock cap per trial (0 = off)",
       [](C& c, std::string_view v) { c.budget_seconds = parse_number<double>("budget_seconds", v); },
       [](const C& c) { return format_double(c.budget_seconds); }},
      {"trials", "number of trials", [](C& c, std::string_view v) { c.trials = parse_number<int>("trials", v); },
       [](const C& c) { return std::to_string(c.trials); }},
      {"out", "output directory", [](C& c, std::string_view v) { c.out = v; }, [](const C& c) { return c.out; }},
      {"max_input_size", "largest input in bytes",
       [](C& c, std::string_view v) { c.max_input_size = parse_number<std::size_t>("max_input_size", v); },
       [](const C& c) { return std::to_string(c.max_input_size); }},
      {"dict", "dictionary file", [](C& c, std::string_view v) { c.dict = v; }, [](const C& c) { return c.dict; }},
      {"seed_dir", "initial seed directory (default: the target's built-in seeds)",
       [](C& c, std::string_view v) { c.seed_dir = v; }, [](const C& c) { return c.seed_dir; }},
      {"hitcount_buckets", "count AFL hit-count buckets as coverage",
       [](C& c, std::string_view v) { c.hitcount_buckets = parse_bool("hitcount_buckets", v); },
       [](const C& c) { return std::string(c.hitcount_buckets ? "true" : "false"); }},
      {"base_energy", "inputs per selected seed",
       [](C& c, std::string_view v) { c.scheduler.base_energy = parse_number<double>("base_energy", v); },
       [](const C& c) { return format_double(c.scheduler.base_energy); }},
      {"unproductive_factor", "energy multiplier after a round without new coverage",
       [](C& c, std::string_view v) { c.scheduler.unproductive_factor = parse_fraction("unproductive_factor", v); },
       [](const C& c) { return format_double(c.scheduler.unproductive_factor); }},
      {"min_energy", "energy floor", [](C& c, std::string_view v) { c.scheduler.min_energy = parse_number<int>("min_energy", v); },
       [](const C& c) { return std::to_string(c.scheduler.min_energy); }},
      {"max_energy", "energy ceiling", [](C& c, std::string_view v) { c.scheduler.max_energy = parse_number<int>("max_energy", v); },
       [](const C& c) { return std::to_string(c.scheduler.max_energy); }},
      {"save_corpus", "write corpus/ and crashes/ per trial",
       [](C& c, std::string_view v) { c.save_corpus = parse_bool("save_corpus", v); },
       [](const C& c) { return std::string(c.save_corpus ? "true" : "false"); }},
      {"training_only", "train for the whole budget (dataset collection)",
       [](C& c, std::string_view v) { c.training_only = parse_bool("training_only", v); },
       [](const C& c) { return std::string(c.training_only ? "true" : "false"); }},
      {"jobs", "trials run in parallel", [](C& c, std::string_view v) { c.jobs = parse_number<int>("jobs", v); },
       [](const C& c) { return std::to_string(c.jobs); }},
      {"bandit_explore_fraction", "guided-phase share with uniform lengths only",
       [](C& c, std::string_view v) { c.bandit_explore_fraction = parse_fraction("bandit_explore_fraction", v); },
       [](const C& c) { return format_double(c.bandit_explore_fraction); }},
      {"bandit_exploit_probability", "chance of taking the best length afterwards",
       [](C& c, std::string_view v) { c.bandit_exploit_probability = parse_fraction("bandit_exploit_probability", v); },
       [](const C& c) { return format_double(c.bandit_exploit_probability); }},
  };
  return keys;
}

inline const ConfigKey& find_config_key(std::string_view name) {
  for (const auto& k : config_keys())
    if (k.name == name) return k;
  throw ConfigError("unknown config key '" + std::string(name) + "'");
}

inline void set_config_value(CampaignConfig& cfg, std::string_view key, std::string_view value) {
  find_config_key(key).set(cfg, detail::trim(value));
}

// key = value lines; '#' starts a comment line.
inline void apply_config_text(CampaignConfig& cfg, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      set_config_value(cfg, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline void apply_config_file(CampaignConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

inline std::string format_config(const CampaignConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  return out;
}

}  // namespace pairfuzz
