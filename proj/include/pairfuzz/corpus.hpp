#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pairfuzz/bytes.hpp"
#include "pairfuzz/mutators.hpp"
#include "pairfuzz/rng.hpp"

namespace pairfuzz {

struct Provenance {
  std::size_t parent = 0;
  MutatorSequence sequence;
};

struct SeedEntry {
  Bytes input;
  std::uint64_t hash = 0;
  std::uint64_t times_selected = 0;
  std::uint64_t discovered_at = 0;
  std::optional<Provenance> provenance;  // absent for initial seeds
  // Outcome of the most recent round spent on this seed; empty until selected.
  std::optional<bool> productive_last_round;
};

struct CrashEntry {
  Bytes input;
  std::string bug_id;
  std::uint64_t hash = 0;
  std::uint64_t exec_index = 0;
};

struct SchedulerConfig {
  double base_energy = 64;
  double unproductive_factor = 0.25;
  int min_energy = 16;
  int max_energy = 4096;
};

class Corpus {
 public:
  // Inserts unless a byte-identical entry exists.
  bool add_if_new(Bytes input, std::optional<Provenance> provenance, std::uint64_t exec_index = 0) {
    const std::uint64_t h = fnv1a64(input);
    if (find(input, h)) return false;
    index_[h].push_back(entries_.size());
    lengths_.insert(std::upper_bound(lengths_.begin(), lengths_.end(), input.size()), input.size());
    entries_.push_back({std::move(input), h, 0, exec_index, std::move(provenance), std::nullopt});
    return true;
  }

  bool add_crash(Bytes input, std::string bug_id, std::uint64_t exec_index) {
    const std::uint64_t h = fnv1a64(input);
    auto& bucket = crash_index_[h];
    for (std::size_t i : bucket)
      if (crashes_[i].input == input) return false;
    bucket.push_back(crashes_.size());
    crashes_.push_back({std::move(input), std::move(bug_id), h, exec_index});
    return true;
  }

  bool contains(ByteView input) const { return find(input, fnv1a64(input)); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<SeedEntry>& entries() const { return entries_; }
  const SeedEntry& operator[](std::size_t i) const { return entries_[i]; }
  SeedEntry& operator[](std::size_t i) { return entries_[i]; }
  const std::vector<CrashEntry>& crashes() const { return crashes_; }

  // Median input length; the mean of the two middle values for even sizes.
  double median_length() const {
    if (lengths_.empty()) return 0.0;
    const std::size_t m = lengths_.size() / 2;
    if (lengths_.size() % 2) return static_cast<double>(lengths_[m]);
    return 0.5 * static_cast<double>(lengths_[m - 1] + lengths_[m]);
  }

  CorpusView view() const {
    return {entries_.size(), [this](std::size_t i) { return ByteView(entries_[i].input); }};
  }

 private:
  bool find(ByteView input, std::uint64_t h) const {
    auto it = index_.find(h);
    if (it == index_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(), [&](std::size_t i) {
      return std::equal(input.begin(), input.end(), entries_[i].input.begin(), entries_[i].input.end());
    });
  }

  std::vector<SeedEntry> entries_;
  std::vector<std::size_t> lengths_;  // sorted
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index_;
  std::vector<CrashEntry> crashes_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> crash_index_;
};

// Selection weight: rarely picked and short seeds are favoured.
inline double selection_weight(const SeedEntry& e, double median_length) {
  return (1.0 / (1.0 + static_cast<double>(e.times_selected))) *
         (median_length / static_cast<double>(std::max<std::size_t>(1, e.input.size())));
}

// Samples one entry in proportion to selection_weight and bumps its
// selection counter. Returns the entry's index.
template <RandomSource R>
std::size_t select_seed(Corpus& corpus, R& rng) {
  if (corpus.empty()) throw std::logic_error("select_seed on an empty corpus");
  const double median = corpus.median_length();
  std::vector<double> weights(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) weights[i] = selection_weight(corpus[i], median);
  const std::size_t chosen = corpus.size() == 1 ? 0 : DiscreteSampler(weights).sample(rng);
  ++corpus[chosen].times_selected;
  return chosen;
}

// Number of inputs to generate from a seed in one round.
inline int assign_energy(const SeedEntry& seed, const SchedulerConfig& cfg) {
  double energy = cfg.base_energy;
  if (seed.productive_last_round.has_value() && !*seed.productive_last_round) energy *= cfg.unproductive_factor;
  const double clamped = std::clamp(energy, static_cast<double>(cfg.min_energy), static_cast<double>(cfg.max_energy));
  return static_cast<int>(clamped);
}

}  // namespace pairfuzz
