#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pairfuzz/config.hpp"
#include "pairfuzz/corpus.hpp"
#include "pairfuzz/coverage.hpp"
#include "pairfuzz/dictionary.hpp"
#include "pairfuzz/matrix_io.hpp"
#include "pairfuzz/mutators.hpp"
#include "pairfuzz/strategy.hpp"
#include "pairfuzz/target.hpp"
#include "pairfuzz/targets/builtin.hpp"

namespace pairfuzz {

struct CurvePoint {
  std::uint64_t exec_index = 0;
  std::uint64_t coverage = 0;
  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

enum class EventPhase { seed, training, guided };

inline std::string_view to_string(EventPhase p) {
  switch (p) {
    case EventPhase::seed: return "seed";
    case EventPhase::training: return "training";
    case EventPhase::guided: return "guided";
  }
  return "?";
}

struct InterestingEvent {
  std::uint64_t exec_index = 0;
  std::size_t entry = 0;                // corpus index of the new entry
  std::optional<std::size_t> parent;    // absent for initial seeds
  MutatorSequence sequence;             // effective ids applied
  EventPhase phase = EventPhase::seed;
  bool credited = false;                // counted into the training matrix
  std::uint64_t coverage = 0;           // global count after this input
  Bytes input;
};

struct CrashEvent {
  std::uint64_t exec_index = 0;
  std::string bug_id;
  Bytes input;
};

struct TrialRecord {
  std::string target;
  std::string strategy;
  std::uint64_t seed = 0;
  std::uint64_t budget = 0;
  std::uint64_t executions = 0;
  std::uint64_t seed_executions = 0;
  std::uint64_t training_executions = 0;
  std::uint64_t final_coverage = 0;
  std::vector<CurvePoint> curve;
  std::vector<InterestingEvent> interesting;
  std::vector<CrashEvent> crashes;
  PairCountMatrix pairs;
  std::optional<double> triplet_sparsity;
  LengthBandit bandit;
  bool uses_bandit = false;
  std::string config_text;

  std::uint64_t unique_bugs() const {
    std::vector<std::string_view> ids;
    for (const auto& c : crashes)
      if (std::find(ids.begin(), ids.end(), c.bug_id) == ids.end()) ids.push_back(c.bug_id);
    return ids.size();
  }

  std::uint64_t training_interesting() const {
    std::uint64_t n = 0;
    for (const auto& e : interesting) n += e.phase == EventPhase::training;
    return n;
  }
};

inline std::string to_hex(ByteView data) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    s += digits[b >> 4];
    s += digits[b & 15];
  }
  return s;
}

inline Bytes from_hex(std::string_view s) {
  if (s.size() % 2) throw std::invalid_argument("odd-length hex string");
  Bytes out(s.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = detail::hex_digit(s[2 * i]);
    const int lo = detail::hex_digit(s[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

// Everything a trial needs besides the config, resolved up front so that
// configuration errors surface before the first execution.
struct TrialSetup {
  TargetPtr target;
  std::vector<Bytes> seeds;
  std::vector<Bytes> dictionary;
  std::optional<PairCountMatrix> cross_counts;
};

inline TrialSetup prepare_trial(const CampaignConfig& cfg) {
  cfg.validate();
  TrialSetup s;
  try {
    s.target = find_target(cfg.target);
  } catch (const UnknownTarget& e) {
    throw ConfigError(e.what());
  }
  try {
    s.seeds = cfg.seed_dir.empty() ? s.target->seeds() : load_seed_dir(cfg.seed_dir);
    if (!cfg.dict.empty()) s.dictionary = load_dictionary(cfg.dict);
    if (cfg.strategy == StrategyMode::cross_program) s.cross_counts = load_matrix(cfg.cross_matrix);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return s;
}

inline StrategyConfig strategy_config(const CampaignConfig& cfg, const TrialSetup& setup) {
  StrategyConfig sc;
  sc.mode = cfg.strategy;
  sc.first_mutator = cfg.first_mutator;
  sc.length = cfg.length_mode;
  sc.t_train_fraction = cfg.t_train_fraction;
  sc.budget = cfg.budget;
  sc.training_only = cfg.training_only;
  sc.cross_counts = setup.cross_counts;
  sc.bandit_explore_fraction = cfg.bandit_explore_fraction;
  sc.bandit_exploit_probability = cfg.bandit_exploit_probability;
  return sc;
}

// One fuzzing campaign: seed selection, energy, mutation by the configured
// strategy, execution, corpus update. Runs exactly cfg.budget executions
// (fewer only if the wall-clock cap fires).
inline TrialRecord run_trial(const CampaignConfig& cfg, const TrialSetup& setup, Corpus* corpus_out = nullptr) {
  const Target& target = *setup.target;
  Rng rng(cfg.seed);
  Strategy strategy(strategy_config(cfg, setup));
  Executor executor(target, cfg.hitcount_buckets);
  CoverageMap global;
  Corpus corpus;

  TrialRecord rec;
  rec.target = std::string(target.name());
  rec.strategy = std::string(to_string(cfg.strategy));
  rec.seed = cfg.seed;
  rec.budget = cfg.budget;
  rec.config_text = format_config(cfg);
  rec.curve.push_back({0, 0});

  MutationContext ctx;
  ctx.dictionary = setup.dictionary;
  ctx.auto_dictionary = target.tokens();
  ctx.max_input_size = cfg.max_input_size;
  ctx.corpus = corpus.view();

  const auto started = std::chrono::steady_clock::now();
  auto out_of_time = [&] {
    if (cfg.budget_seconds <= 0) return false;
    const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - started;
    return spent.count() >= cfg.budget_seconds;
  };

  // A crashing input is kept when its bug is new or it adds edges to the
  // crash-only coverage map.
  CoverageMap crash_coverage;
  std::vector<std::string> bugs_seen;
  auto keep_crash = [&](const Bytes& input, const ExecResult& res) {
    const bool new_path = is_interesting(crash_coverage, res);
    const bool new_bug = std::find(bugs_seen.begin(), bugs_seen.end(), *res.bug_id) == bugs_seen.end();
    if (new_bug) bugs_seen.push_back(*res.bug_id);
    if ((new_bug || new_path) && corpus.add_crash(input, *res.bug_id, res.exec_index))
      rec.crashes.push_back({res.exec_index, *res.bug_id, input});
  };

  std::uint64_t execs = 0;
  for (const Bytes& raw : setup.seeds) {
    if (execs >= cfg.budget) break;
    Bytes seed = raw;
    if (seed.empty()) continue;
    if (seed.size() > cfg.max_input_size) seed.resize(cfg.max_input_size);
    const ExecResult& res = executor.run(seed);
    ++execs;
    if (res.crashed) {
      keep_crash(seed, res);
      continue;
    }
    const bool fresh = is_interesting(global, res);
    if (!corpus.add_if_new(seed, std::nullopt, res.exec_index)) continue;
    rec.interesting.push_back({res.exec_index, corpus.size() - 1, std::nullopt, {}, EventPhase::seed, false,
                               global.count(), seed});
    if (fresh) rec.curve.push_back({res.exec_index, global.count()});
  }
  if (corpus.empty()) throw ConfigError("no usable initial seed for target " + rec.target);
  rec.seed_executions = execs;

  MutatorSequence seq;
  MutatorSequence effective;
  Bytes buf;
  bool stop = false;
  while (execs < cfg.budget && !stop) {
    const std::size_t parent = select_seed(corpus, rng);
    const int energy = assign_energy(corpus[parent], cfg.scheduler);
    bool productive = false;
    for (int e = 0; e < energy && execs < cfg.budget; ++e) {
      if ((execs & 1023) == 0 && out_of_time()) {
        stop = true;
        break;
      }
      strategy.advance(execs, rng);
      if (strategy.phase() == Phase::training) ++rec.training_executions;
      strategy.next_sequence(rng, seq);
      buf = corpus[parent].input;
      ctx.corpus.size = corpus.size();
      apply_sequence(seq, buf, ctx, rng, effective);
      const ExecResult& res = executor.run(buf);
      ++execs;

      bool fresh = false;
      if (res.crashed) {
        keep_crash(buf, res);
      } else {
        fresh = is_interesting(global, res);
      }
      const EventPhase phase = strategy.phase() == Phase::training ? EventPhase::training : EventPhase::guided;
      const bool credited = strategy.report(effective, fresh);
      if (!fresh) continue;
      productive = true;
      corpus.add_if_new(buf, Provenance{parent, effective}, res.exec_index);
      rec.interesting.push_back({res.exec_index, corpus.size() - 1, parent, effective, phase, credited, global.count(), buf});
      rec.curve.push_back({res.exec_index, global.count()});
    }
    corpus[parent].productive_last_round = productive;
  }

  rec.executions = execs;
  rec.final_coverage = global.count();
  rec.curve.push_back({execs, global.count()});
  rec.pairs = strategy.pair_counts();
  if (cfg.strategy == StrategyMode::pairwise_p2) rec.triplet_sparsity = strategy.triplet_counts().sparsity();
  rec.bandit = strategy.bandit();
  rec.uses_bandit = strategy.uses_bandit();
  if (corpus_out) *corpus_out = std::move(corpus);
  return rec;
}

inline TrialRecord run_trial(const CampaignConfig& cfg) { return run_trial(cfg, prepare_trial(cfg)); }

// Re-executes every logged input and returns the size of the union of their
// coverage; equals the trial's final coverage.
inline std::uint64_t replay_coverage(const Target& target, const std::vector<InterestingEvent>& log,
                                     bool hitcount_buckets = false) {
  Executor executor(target, hitcount_buckets);
  CoverageMap global;
  for (const auto& e : log) is_interesting(global, executor.run(e.input));
  return global.count();
}

// File name -> contents. Deterministic: no timestamps, no wall-clock data.
inline std::map<std::string, std::string> serialize(const TrialRecord& r) {
  std::map<std::string, std::string> files;
  {
    std::ostringstream os;
    os << r.config_text;
    os << "# results\n";
    os << "executions = " << r.executions << '\n';
    os << "seed_executions = " << r.seed_executions << '\n';
    os << "training_executions = " << r.training_executions << '\n';
    os << "final_coverage = " << r.final_coverage << '\n';
    os << "corpus_size = " << r.interesting.size() << '\n';
    os << "unique_crashes = " << r.unique_bugs() << '\n';
    os << "crash_inputs = " << r.crashes.size() << '\n';
    if (r.triplet_sparsity) os << "triplet_sparsity = " << detail::format_double(*r.triplet_sparsity) << '\n';
    files["meta.txt"] = os.str();
  }
  {
    std::ostringstream os;
    os << "exec_index,coverage\n";
    for (const auto& p : r.curve) os << p.exec_index << ',' << p.coverage << '\n';
    files["curve.csv"] = os.str();
  }
  {
    std::ostringstream os;
    os << "exec_index,entry,parent,phase,sequence,credited,coverage,input_hex\n";
    for (const auto& e : r.interesting) {
      os << e.exec_index << ',' << e.entry << ',';
      if (e.parent) os << *e.parent;
      os << ',' << to_string(e.phase) << ',' << format_sequence(e.sequence) << ',' << (e.credited ? 1 : 0) << ','
         << e.coverage << ',' << to_hex(e.input) << '\n';
    }
    files["interesting.csv"] = os.str();
  }
  {
    std::ostringstream os;
    os << "exec_index,bug_id,input_hex\n";
    for (const auto& c : r.crashes) os << c.exec_index << ',' << c.bug_id << ',' << to_hex(c.input) << '\n';
    files["crashes.csv"] = os.str();
  }
  {
    std::ostringstream os;
    write_matrix_csv(os, r.pairs);
    files["pairs.csv"] = os.str();
  }
  {
    std::ostringstream os;
    os << "length,pulls,rewards\n";
    if (r.uses_bandit)
      for (int l = LengthBandit::kMinArm; l <= LengthBandit::kMaxArm; ++l)
        os << l << ',' << r.bandit.pulls(l) << ',' << r.bandit.rewards(l) << '\n';
    files["bandit.csv"] = os.str();
  }
  return files;
}

inline void write_files(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
  }
}

inline void write_bytes(const std::filesystem::path& path, ByteView data) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

// corpus/<exec_index>_<hash>.bin and crashes/<bug_id>/<hash>.bin
inline void save_corpus(const std::filesystem::path& dir, const Corpus& corpus) {
  for (const auto& e : corpus.entries())
    write_bytes(dir / "corpus" / (std::to_string(e.discovered_at) + "_" + hex64(e.hash) + ".bin"), e.input);
  for (const auto& c : corpus.crashes()) write_bytes(dir / "crashes" / c.bug_id / (hex64(c.hash) + ".bin"), c.input);
}

inline void write_trial(const std::filesystem::path& dir, const TrialRecord& r) { write_files(dir, serialize(r)); }

inline std::vector<CurvePoint> read_curve(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<CurvePoint> curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    curve.push_back({std::stoull(line.substr(0, comma)), std::stoull(line.substr(comma + 1))});
  }
  return curve;
}

// --- experiments -----------------------------------------------------------

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One strategy configuration inside an experiment; `label` names its
// directory and its rows in the summary.
struct ExperimentArm {
  std::string label;
  CampaignConfig config;
};

struct TrialSummary {
  std::string variant;
  std::string strategy;
  std::string target;
  int trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t final_coverage = 0;
  std::uint64_t executions = 0;
  std::uint64_t interesting = 0;
  std::uint64_t unique_crashes = 0;
};

inline constexpr std::string_view kSummaryHeader =
    "variant,strategy,target,trial,seed,final_coverage,executions,interesting,unique_crashes";

// Trial k (0-based) of an arm runs with seed master + k + 1.
inline std::uint64_t trial_seed(std::uint64_t master, int trial) { return master + static_cast<std::uint64_t>(trial) + 1; }

inline std::filesystem::path trial_dir(const std::filesystem::path& out, const ExperimentArm& arm, int trial) {
  return out / arm.label / arm.config.target / ("trial_" + std::to_string(trial));
}

// Runs tasks on up to `jobs` threads; the first exception is rethrown after
// all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn fn) {
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
}

inline std::string format_summary(const std::vector<TrialSummary>& rows) {
  std::ostringstream os;
  os << kSummaryHeader << '\n';
  for (const auto& s : rows)
    os << s.variant << ',' << s.strategy << ',' << s.target << ',' << s.trial << ',' << s.seed << ',' << s.final_coverage
       << ',' << s.executions << ',' << s.interesting << ',' << s.unique_crashes << '\n';
  return os.str();
}

// Runs `trials` trials of every arm and writes per-trial records under
// out/<label>/<target>/trial_<k>/ plus out/summary.csv.
inline std::vector<TrialSummary> run_experiment(const std::vector<ExperimentArm>& arms, int trials,
                                                const std::filesystem::path& out, int jobs = 1) {
  if (arms.empty()) throw ExperimentError("experiment needs at least one configuration");
  if (trials < 1) throw ExperimentError("trials must be at least 1");
  std::vector<TrialSetup> setups;
  for (const auto& arm : arms) setups.push_back(prepare_trial(arm.config));

  const std::size_t tasks = arms.size() * static_cast<std::size_t>(trials);
  std::vector<TrialSummary> rows(tasks);
  parallel_for(tasks, jobs, [&](std::size_t task) {
    const std::size_t a = task / static_cast<std::size_t>(trials);
    const int k = static_cast<int>(task % static_cast<std::size_t>(trials));
    CampaignConfig cfg = arms[a].config;
    cfg.seed = trial_seed(arms[a].config.seed, k);
    try {
      Corpus corpus;
      const TrialRecord r = run_trial(cfg, setups[a], cfg.save_corpus ? &corpus : nullptr);
      const auto dir = trial_dir(out, arms[a], k);
      write_trial(dir, r);
      if (cfg.save_corpus) save_corpus(dir, corpus);
      rows[task] = {arms[a].label, r.strategy, r.target, k, cfg.seed, r.final_coverage, r.executions,
                    r.interesting.size(), r.unique_bugs()};
    } catch (const std::exception& e) {
      throw ExperimentError("trial " + arms[a].label + "/" + std::to_string(k) + " with seed " + std::to_string(cfg.seed) +
                            " failed: " + e.what());
    }
  });
  write_files(out, {{"summary.csv", format_summary(rows)}});
  return rows;
}

struct CollectSummary {
  int trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t interesting = 0;
  std::uint64_t matrix_total = 0;
  std::uint64_t final_coverage = 0;
};

// Dataset collection: pairwise training for the whole budget, one count
// matrix per trial at out/matrices/trial_<k>.csv.
inline std::vector<PairCountMatrix> collect_dataset(CampaignConfig cfg, const std::filesystem::path& out,
                                                    std::vector<CollectSummary>* summary = nullptr) {
  cfg.strategy = StrategyMode::pairwise;
  cfg.training_only = true;
  const TrialSetup setup = prepare_trial(cfg);
  std::vector<PairCountMatrix> matrices(static_cast<std::size_t>(cfg.trials));
  std::vector<CollectSummary> rows(static_cast<std::size_t>(cfg.trials));
  parallel_for(matrices.size(), cfg.jobs, [&](std::size_t k) {
    CampaignConfig c = cfg;
    c.seed = trial_seed(cfg.seed, static_cast<int>(k));
    try {
      const TrialRecord r = run_trial(c, setup);
      matrices[k] = r.pairs;
      rows[k] = {static_cast<int>(k), c.seed, r.training_interesting(), r.pairs.total(), r.final_coverage};
    } catch (const std::exception& e) {
      throw ExperimentError("collect trial " + std::to_string(k) + " with seed " + std::to_string(c.seed) +
                            " failed: " + e.what());
    }
  });
  std::filesystem::create_directories(out / "matrices");
  for (std::size_t k = 0; k < matrices.size(); ++k)
    save_matrix(out / "matrices" / ("trial_" + std::to_string(k) + ".csv"), matrices[k]);
  std::ostringstream os;
  os << "target,trial,seed,interesting,matrix_total,final_coverage\n";
  for (const auto& r : rows)
    os << cfg.target << ',' << r.trial << ',' << r.seed << ',' << r.interesting << ',' << r.matrix_total << ','
       << r.final_coverage << '\n';
  write_files(out, {{"collect.csv", os.str()}, {"config.txt", format_config(cfg)}});
  if (summary) *summary = rows;
  return matrices;
}

inline std::vector<PairCountMatrix> load_matrix_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    // trial_2 before trial_10
    const auto sa = a.stem().string(), sb = b.stem().string();
    return sa.size() != sb.size() ? sa.size() < sb.size() : sa < sb;
  });
  std::vector<PairCountMatrix> out;
  for (const auto& f : files) out.push_back(load_matrix(f));
  return out;
}

// The variant grid of the ablation study. `cross_matrix` is the count matrix
// learned on another program.
inline std::vector<ExperimentArm> ablation_arms(const CampaignConfig& base, const std::string& cross_matrix) {
  auto arm = [&](std::string label, auto tweak) {
    CampaignConfig c = base;
    c.strategy = StrategyMode::pairwise;
    c.first_mutator = FirstMutatorMode::uniform;
    c.length_mode = LengthMode::bandit;
    c.t_train_fraction = 1.0 / 24.0;
    c.training_only = false;
    tweak(c);
    return ExperimentArm{std::move(label), c};
  };
  return {
      arm("original", [](CampaignConfig&) {}),
      arm("p2", [](CampaignConfig& c) { c.strategy = StrategyMode::pairwise_p2; }),
      arm("default_length", [](CampaignConfig& c) { c.length_mode = LengthMode::fixed_default; }),
      arm("weighted_m1", [](CampaignConfig& c) { c.first_mutator = FirstMutatorMode::weighted; }),
      arm("random", [](CampaignConfig& c) { c.strategy = StrategyMode::random_matrix; }),
      arm("t_train_1_12", [](CampaignConfig& c) { c.t_train_fraction = 1.0 / 12.0; }),
      arm("t_train_1_48", [](CampaignConfig& c) { c.t_train_fraction = 1.0 / 48.0; }),
      arm("cross_program", [&](CampaignConfig& c) {
        c.strategy = StrategyMode::cross_program;
        c.cross_matrix = cross_matrix;
      }),
  };
}

// Target whose learned matrix feeds the cross-program variant when none is
// given: the next built-in target after `target`.
inline std::string donor_target(const std::string& target) {
  const auto& all = builtin_targets();
  for (std::size_t i = 0; i < all.size(); ++i)
    if (all[i]->name() == target) return std::string(all[(i + 1) % all.size()]->name());
  throw ConfigError("unknown target '" + target + "'");
}

// Learns a count matrix on the donor target (training only, same budget and
// master seed) and stores it at `path`.
inline void train_donor_matrix(const CampaignConfig& base, const std::filesystem::path& path) {
  CampaignConfig c = base;
  c.target = donor_target(base.target);
  c.strategy = StrategyMode::pairwise;
  c.training_only = true;
  c.seed_dir.clear();
  const TrialRecord r = run_trial(c);
  std::filesystem::create_directories(path.parent_path());
  save_matrix(path, r.pairs);
}

}  // namespace pairfuzz
