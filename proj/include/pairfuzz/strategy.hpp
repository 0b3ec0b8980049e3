#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pairfuzz/mutators.hpp"
#include "pairfuzz/rng.hpp"

namespace pairfuzz {

inline constexpr std::size_t kM = kMutatorCount;

// N(i,j): interesting inputs produced by the ordered pair <i, j>.
class PairCountMatrix {
 public:
  using Counts = std::array<std::array<std::uint64_t, kM>, kM>;

  PairCountMatrix() : counts_{} {}
  explicit PairCountMatrix(const Counts& c) : counts_(c) {}

  void record(MutatorId i, MutatorId j) { ++counts_[i.index()][j.index()]; }
  std::uint64_t at(MutatorId i, MutatorId j) const { return counts_[i.index()][j.index()]; }
  std::uint64_t at_index(std::size_t i, std::size_t j) const { return counts_[i][j]; }
  void set_index(std::size_t i, std::size_t j, std::uint64_t v) { counts_[i][j] = v; }

  std::uint64_t row_sum(std::size_t i) const {
    std::uint64_t s = 0;
    for (auto v : counts_[i]) s += v;
    return s;
  }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < kM; ++i) s += row_sum(i);
    return s;
  }

  const Counts& counts() const { return counts_; }

  friend bool operator==(const PairCountMatrix&, const PairCountMatrix&) = default;

 private:
  Counts counts_;
};

// Row-stochastic Pr(m_n = j | m_{n-1} = i).
class ConditionalMatrix {
 public:
  using Rows = std::array<std::array<double, kM>, kM>;

  ConditionalMatrix() : ConditionalMatrix(uniform_rows(), all_rows()) {}

  // `rows` must already be normalized.
  ConditionalMatrix(const Rows& rows, std::vector<std::size_t> fallback_rows)
      : rows_(rows), fallback_(std::move(fallback_rows)) {
    std::sort(fallback_.begin(), fallback_.end());
    samplers_.reserve(kM);
    for (const auto& row : rows_) samplers_.emplace_back(row);
  }

  double probability(MutatorId from, MutatorId to) const { return rows_[from.index()][to.index()]; }
  const std::array<double, kM>& row(MutatorId from) const { return rows_[from.index()]; }
  const Rows& rows() const { return rows_; }

  const std::vector<std::size_t>& fallback_rows() const { return fallback_; }
  bool is_fallback(MutatorId row) const {
    return std::binary_search(fallback_.begin(), fallback_.end(), row.index());
  }

  template <RandomSource R>
  MutatorId sample(MutatorId prev, R& rng) const {
    return MutatorId::from_index(samplers_[prev.index()].sample(rng));
  }

  static Rows uniform_rows() {
    Rows r;
    for (auto& row : r) row.fill(1.0 / static_cast<double>(kM));
    return r;
  }

 private:
  static std::vector<std::size_t> all_rows() {
    std::vector<std::size_t> v(kM);
    for (std::size_t i = 0; i < kM; ++i) v[i] = i;
    return v;
  }

  Rows rows_;
  std::vector<std::size_t> fallback_;
  std::vector<DiscreteSampler> samplers_;
};

// Row i becomes N(i,.) / sum_j N(i,j); an all-zero row becomes uniform and is
// flagged as a fallback row.
inline ConditionalMatrix normalize(const PairCountMatrix& counts) {
  ConditionalMatrix::Rows rows{};
  std::vector<std::size_t> fallback;
  for (std::size_t i = 0; i < kM; ++i) {
    const std::uint64_t sum = counts.row_sum(i);
    if (sum == 0) {
      rows[i].fill(1.0 / static_cast<double>(kM));
      fallback.push_back(i);
      continue;
    }
    for (std::size_t j = 0; j < kM; ++j)
      rows[i][j] = static_cast<double>(counts.at_index(i, j)) / static_cast<double>(sum);
  }
  return ConditionalMatrix(rows, std::move(fallback));
}

// s_i = sum_j N(i,j) + sum_j N(j,i) - N(i,i)
inline std::array<std::uint64_t, kM> first_mutator_scores(const PairCountMatrix& counts) {
  std::array<std::uint64_t, kM> s{};
  for (std::size_t i = 0; i < kM; ++i) {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < kM; ++j) v += counts.at_index(i, j) + counts.at_index(j, i);
    s[i] = v - counts.at_index(i, i);
  }
  return s;
}

// Weights proportional to the scores, uniform when all scores are zero.
inline WeightTable score_weights(const std::array<std::uint64_t, kM>& scores) {
  std::array<double, kM> w{};
  double total = 0;
  for (std::size_t i = 0; i < kM; ++i) total += w[i] = static_cast<double>(scores[i]);
  if (total == 0) return WeightTable::uniform();
  return WeightTable(w);
}

// The isolated-marginal baseline: each mutator weighted by its score alone,
// with no transition structure.
inline WeightTable build_isolated_strategy(const PairCountMatrix& counts) {
  return score_weights(first_mutator_scores(counts));
}

template <RandomSource R>
ConditionalMatrix build_random_matrix(R& rng) {
  ConditionalMatrix::Rows rows{};
  for (auto& row : rows) {
    double sum = 0;
    for (auto& v : row) sum += v = rng.uniform();
    if (sum == 0) {
      row.fill(1.0 / static_cast<double>(kM));
      continue;
    }
    for (auto& v : row) v /= sum;
  }
  return ConditionalMatrix(rows, {});
}

template <RandomSource R>
std::array<MutatorId, 2> training_sequence(R& rng) {
  const auto a = MutatorId::from_index(rng.below(kM));
  const auto b = MutatorId::from_index(rng.below(kM));
  return {a, b};
}

template <RandomSource R>
MutatorId sample_next(const ConditionalMatrix& conditional, MutatorId prev, R& rng) {
  return conditional.sample(prev, rng);
}

// Markov walk of the given length starting at `first`.
template <RandomSource R>
MutatorSequence generate_sequence_guided(const ConditionalMatrix& conditional, MutatorId first, int length, R& rng) {
  MutatorSequence seq{first};
  for (int n = 1; n < length; ++n) seq.push_back(conditional.sample(seq.back(), rng));
  return seq;
}

// N(i,j,k) for the second-order variant.
class TripletCountTensor {
 public:
  static constexpr std::size_t kCells = kM * kM * kM;

  TripletCountTensor() : counts_(kCells, 0) {}

  static constexpr std::size_t cell(std::size_t i, std::size_t j, std::size_t k) { return (i * kM + j) * kM + k; }

  void record(MutatorId i, MutatorId j, MutatorId k) {
    auto& c = counts_[cell(i.index(), j.index(), k.index())];
    if (c++ == 0) ++nonzero_;
  }
  std::uint64_t at(MutatorId i, MutatorId j, MutatorId k) const { return counts_[cell(i.index(), j.index(), k.index())]; }
  std::uint64_t at_index(std::size_t i, std::size_t j, std::size_t k) const { return counts_[cell(i, j, k)]; }

  std::size_t nonzero() const { return nonzero_; }
  // Fraction of the 32768 triplets that were ever credited.
  double sparsity() const { return static_cast<double>(nonzero_) / static_cast<double>(kCells); }

  std::uint64_t total() const {
    std::uint64_t s = 0;
    for (auto v : counts_) s += v;
    return s;
  }

 private:
  std::vector<std::uint64_t> counts_;
  std::size_t nonzero_ = 0;
};

// Pr(m_n | m_{n-2}, m_{n-1}). Empty (i,j) slices defer to the pairwise row j.
class TripletConditional {
 public:
  TripletConditional(const TripletCountTensor& tensor, ConditionalMatrix pairwise) : pairwise_(std::move(pairwise)) {
    samplers_.resize(kM * kM);
    for (std::size_t i = 0; i < kM; ++i)
      for (std::size_t j = 0; j < kM; ++j) {
        std::array<double, kM> w{};
        double sum = 0;
        for (std::size_t k = 0; k < kM; ++k) sum += w[k] = static_cast<double>(tensor.at_index(i, j, k));
        if (sum > 0) samplers_[i * kM + j] = DiscreteSampler(w);
      }
  }

  bool has_slice(MutatorId prev2, MutatorId prev1) const {
    return samplers_[prev2.index() * kM + prev1.index()].has_value();
  }
  const ConditionalMatrix& pairwise() const { return pairwise_; }

  template <RandomSource R>
  MutatorId sample(MutatorId prev2, MutatorId prev1, R& rng) const {
    const auto& s = samplers_[prev2.index() * kM + prev1.index()];
    if (s) return MutatorId::from_index(s->sample(rng));
    return pairwise_.sample(prev1, rng);
  }

 private:
  std::vector<std::optional<DiscreteSampler>> samplers_;
  ConditionalMatrix pairwise_;
};

template <RandomSource R>
MutatorId sample_next_p2(const TripletConditional& conditional, MutatorId prev2, MutatorId prev1, R& rng) {
  return conditional.sample(prev2, prev1, rng);
}

// Epsilon-greedy choice of the sequence length over {2..16}.
class LengthBandit {
 public:
  static constexpr int kMinArm = 2;
  static constexpr int kMaxArm = 16;
  static constexpr std::size_t kArms = kMaxArm - kMinArm + 1;

  LengthBandit(double explore_fraction = 1.0 / 23.0, double exploit_probability = 0.5)
      : explore_fraction_(explore_fraction), exploit_probability_(exploit_probability) {}

  // Probability of taking the best arm at a given guided-phase progress.
  double epsilon(double progress) const { return progress < explore_fraction_ ? 0.0 : exploit_probability_; }

  // Highest rewards/max(1, pulls); ties go to the shortest length.
  int best_arm() const {
    std::size_t best = 0;
    double best_rate = -1;
    for (std::size_t a = 0; a < kArms; ++a) {
      const double rate = static_cast<double>(rewards_[a]) / static_cast<double>(std::max<std::uint64_t>(1, pulls_[a]));
      if (rate > best_rate) {
        best_rate = rate;
        best = a;
      }
    }
    return static_cast<int>(best) + kMinArm;
  }

  template <RandomSource R>
  int select(double progress, R& rng) const {
    const double eps = epsilon(progress);
    if (eps > 0 && rng.uniform() < eps) return best_arm();
    return kMinArm + static_cast<int>(rng.below(kArms));
  }

  void update(int length, std::uint64_t interesting_count) {
    if (length < kMinArm || length > kMaxArm) throw std::out_of_range("bandit arm out of range: " + std::to_string(length));
    ++pulls_[static_cast<std::size_t>(length - kMinArm)];
    rewards_[static_cast<std::size_t>(length - kMinArm)] += interesting_count;
  }

  std::uint64_t pulls(int length) const { return pulls_[static_cast<std::size_t>(length - kMinArm)]; }
  std::uint64_t rewards(int length) const { return rewards_[static_cast<std::size_t>(length - kMinArm)]; }
  std::uint64_t total_pulls() const {
    std::uint64_t s = 0;
    for (auto p : pulls_) s += p;
    return s;
  }

  friend bool operator==(const LengthBandit&, const LengthBandit&) = default;

 private:
  double explore_fraction_;
  double exploit_probability_;
  std::array<std::uint64_t, kArms> rewards_{};
  std::array<std::uint64_t, kArms> pulls_{};
};

template <RandomSource R>
int bandit_select_length(const LengthBandit& bandit, double progress, R& rng) {
  return bandit.select(progress, rng);
}

inline void bandit_update(LengthBandit& bandit, int length, std::uint64_t interesting_count) {
  bandit.update(length, interesting_count);
}

enum class StrategyMode { fixed, isolated, pairwise, pairwise_p2, random_matrix, cross_program };
enum class FirstMutatorMode { uniform, weighted };
enum class LengthMode { bandit, fixed_default };
enum class Phase { training, guided };

inline std::string_view to_string(StrategyMode m) {
  switch (m) {
    case StrategyMode::fixed: return "fixed";
    case StrategyMode::isolated: return "isolated";
    case StrategyMode::pairwise: return "pairwise";
    case StrategyMode::pairwise_p2: return "pairwise_p2";
    case StrategyMode::random_matrix: return "random_matrix";
    case StrategyMode::cross_program: return "cross_program";
  }
  return "?";
}

inline std::string_view to_string(FirstMutatorMode m) { return m == FirstMutatorMode::uniform ? "uniform" : "weighted"; }
inline std::string_view to_string(LengthMode m) { return m == LengthMode::bandit ? "bandit" : "default"; }
inline std::string_view to_string(Phase p) { return p == Phase::training ? "training" : "guided"; }

inline StrategyMode parse_strategy_mode(std::string_view s) {
  for (auto m : {StrategyMode::fixed, StrategyMode::isolated, StrategyMode::pairwise, StrategyMode::pairwise_p2,
                 StrategyMode::random_matrix, StrategyMode::cross_program})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

inline FirstMutatorMode parse_first_mutator_mode(std::string_view s) {
  if (s == "uniform") return FirstMutatorMode::uniform;
  if (s == "weighted") return FirstMutatorMode::weighted;
  throw std::invalid_argument("unknown first_mutator mode '" + std::string(s) + "'");
}

inline LengthMode parse_length_mode(std::string_view s) {
  if (s == "bandit") return LengthMode::bandit;
  if (s == "default") return LengthMode::fixed_default;
  throw std::invalid_argument("unknown length mode '" + std::string(s) + "'");
}

struct StrategyConfig {
  StrategyMode mode = StrategyMode::pairwise;
  FirstMutatorMode first_mutator = FirstMutatorMode::uniform;
  LengthMode length = LengthMode::bandit;
  double t_train_fraction = 1.0 / 24.0;
  std::uint64_t budget = 2'000'000;
  // Collect mode: stay in training for the whole budget.
  bool training_only = false;
  WeightTable weights = default_weight_table();
  std::optional<PairCountMatrix> cross_counts;  // required for cross_program
  double bandit_explore_fraction = 1.0 / 23.0;
  double bandit_exploit_probability = 0.5;
};

// Executions charged to training: the first index at which
// consumed >= fraction * budget holds.
inline std::uint64_t training_executions(double fraction, std::uint64_t budget) {
  return static_cast<std::uint64_t>(std::ceil(fraction * static_cast<double>(budget)));
}

// Per-trial scheduling state. Call advance(consumed) before each sequence,
// next_sequence to draw it, and report() once the produced input ran.
class Strategy {
 public:
  explicit Strategy(StrategyConfig cfg)
      : cfg_(std::move(cfg)),
        fixed_sampler_(cfg_.weights.weights()),
        bandit_(cfg_.bandit_explore_fraction, cfg_.bandit_exploit_probability) {
    if (!(cfg_.t_train_fraction > 0 && cfg_.t_train_fraction < 1))
      throw std::invalid_argument("t_train_fraction must lie in (0, 1)");
    if (cfg_.mode == StrategyMode::cross_program && !cfg_.cross_counts)
      throw std::invalid_argument("cross_program strategy needs a count matrix");
    train_end_ = cfg_.training_only ? cfg_.budget : training_executions(cfg_.t_train_fraction, cfg_.budget);
    if (cfg_.mode == StrategyMode::fixed) {
      phase_ = Phase::guided;
      train_end_ = 0;
    } else if (cfg_.mode == StrategyMode::cross_program) {
      train_end_ = 0;
    }
  }

  const StrategyConfig& config() const { return cfg_; }
  Phase phase() const { return phase_; }
  std::uint64_t training_end() const { return train_end_; }
  const PairCountMatrix& pair_counts() const { return pairs_; }
  const TripletCountTensor& triplet_counts() const { return triplets_; }
  const LengthBandit& bandit() const { return bandit_; }
  const std::optional<ConditionalMatrix>& conditional() const { return conditional_; }
  const std::array<std::uint64_t, kM>& first_scores() const { return scores_; }
  std::uint64_t guided_sequences() const { return guided_sequences_; }

  bool uses_bandit() const { return learned_chain() && cfg_.length == LengthMode::bandit; }

  // Switches phase once `consumed` executions have been charged.
  template <RandomSource R>
  void advance(std::uint64_t consumed, R& rng) {
    consumed_ = consumed;
    if (phase_ == Phase::training && !cfg_.training_only && consumed >= train_end_) enter_guided(rng);
  }

  template <RandomSource R>
  void next_sequence(R& rng, MutatorSequence& out) {
    out.clear();
    if (phase_ == Phase::training) {
      const std::size_t len = cfg_.mode == StrategyMode::pairwise_p2 ? 3 : 2;
      for (std::size_t n = 0; n < len; ++n) out.push_back(MutatorId::from_index(rng.below(kM)));
      requested_length_ = static_cast<int>(len);
      return;
    }
    if (!learned_chain()) {
      out = generate_sequence_fixed(fixed_sampler_, rng);
      requested_length_ = static_cast<int>(out.size());
      return;
    }
    ++guided_sequences_;
    const int len = cfg_.length == LengthMode::bandit ? bandit_.select(progress(), rng) : sample_default_length(rng);
    requested_length_ = len;
    out.push_back(select_first_mutator(rng));
    for (int n = 1; n < len; ++n) {
      if (triplet_ && n >= 2)
        out.push_back(triplet_->sample(out[n - 2], out[n - 1], rng));
      else
        out.push_back(conditional_->sample(out[n - 1], rng));
    }
  }

  // Feeds back the outcome of the last sequence. Returns true when the
  // effective ids were credited to the training counts.
  bool report(const MutatorSequence& effective, bool interesting) {
    if (phase_ == Phase::training) {
      if (!interesting) return false;
      if (cfg_.mode == StrategyMode::pairwise_p2) {
        triplets_.record(effective[0], effective[1], effective[2]);
        pairs_.record(effective[0], effective[1]);
        pairs_.record(effective[1], effective[2]);
      } else {
        pairs_.record(effective[0], effective[1]);
      }
      return true;
    }
    if (uses_bandit()) bandit_.update(requested_length_, interesting ? 1 : 0);
    return false;
  }

  template <RandomSource R>
  MutatorId select_first_mutator(R& rng) const {
    if (cfg_.first_mutator == FirstMutatorMode::weighted) return MutatorId::from_index(first_sampler_.sample(rng));
    return MutatorId::from_index(rng.below(kM));
  }

  // Guided-phase progress in [0, 1], measured from the phase boundary.
  double progress() const {
    if (cfg_.budget <= train_end_) return 1.0;
    const double done = static_cast<double>(consumed_ > train_end_ ? consumed_ - train_end_ : 0);
    return std::min(1.0, done / static_cast<double>(cfg_.budget - train_end_));
  }

 private:
  bool learned_chain() const {
    return cfg_.mode == StrategyMode::pairwise || cfg_.mode == StrategyMode::pairwise_p2 ||
           cfg_.mode == StrategyMode::random_matrix || cfg_.mode == StrategyMode::cross_program;
  }

  template <RandomSource R>
  void enter_guided(R& rng) {
    phase_ = Phase::guided;
    const PairCountMatrix& source = cfg_.mode == StrategyMode::cross_program ? *cfg_.cross_counts : pairs_;
    scores_ = first_mutator_scores(source);
    first_sampler_ = DiscreteSampler(score_weights(scores_).weights());
    switch (cfg_.mode) {
      case StrategyMode::fixed:
        break;
      case StrategyMode::isolated:
        fixed_sampler_ = DiscreteSampler(build_isolated_strategy(pairs_).weights());
        break;
      case StrategyMode::pairwise:
      case StrategyMode::cross_program:
        conditional_ = normalize(source);
        break;
      case StrategyMode::pairwise_p2:
        conditional_ = normalize(pairs_);
        triplet_.emplace(triplets_, *conditional_);
        break;
      case StrategyMode::random_matrix:
        conditional_ = build_random_matrix(rng);
        break;
    }
  }

  StrategyConfig cfg_;
  Phase phase_ = Phase::training;
  std::uint64_t train_end_ = 0;
  std::uint64_t consumed_ = 0;
  std::uint64_t guided_sequences_ = 0;
  int requested_length_ = 0;
  PairCountMatrix pairs_;
  TripletCountTensor triplets_;
  std::array<std::uint64_t, kM> scores_{};
  DiscreteSampler fixed_sampler_;
  DiscreteSampler first_sampler_;
  std::optional<ConditionalMatrix> conditional_;
  std::optional<TripletConditional> triplet_;
  LengthBandit bandit_;
};

}  // namespace pairfuzz
