#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairfuzz {

// Edge-hit bitmap. Used both as the per-trial global map (monotone) and, when
// materialized, as a per-execution map.
class CoverageMap {
 public:
  static constexpr std::size_t kDefaultSlots = 65536;

  explicit CoverageMap(std::size_t slots = kDefaultSlots) : slots_(slots), words_((slots + 63) / 64, 0) {
    if (slots == 0 || !std::has_single_bit(slots)) throw std::invalid_argument("coverage map size must be a power of two");
  }

  std::size_t size() const { return slots_; }
  std::size_t count() const { return count_; }

  bool test(std::uint32_t slot) const { return (words_[slot >> 6] >> (slot & 63)) & 1u; }

  // Returns true if the slot was newly set.
  bool set(std::uint32_t slot) {
    check(slot);
    std::uint64_t& w = words_[slot >> 6];
    const std::uint64_t bit = std::uint64_t{1} << (slot & 63);
    if (w & bit) return false;
    w |= bit;
    ++count_;
    return true;
  }

  void clear() {
    std::fill(words_.begin(), words_.end(), 0);
    count_ = 0;
  }

  std::vector<std::uint32_t> slots() const {
    std::vector<std::uint32_t> out;
    out.reserve(count_);
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        out.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
        bits &= bits - 1;
      }
    }
    return out;
  }

  friend bool operator==(const CoverageMap& a, const CoverageMap& b) {
    return a.slots_ == b.slots_ && a.words_ == b.words_;
  }

 private:
  void check(std::uint32_t slot) const {
    if (slot >= slots_) throw std::out_of_range("coverage slot " + std::to_string(slot) + " outside map");
  }

  std::size_t slots_;
  std::vector<std::uint64_t> words_;
  std::size_t count_ = 0;
};

// AFL hit-count classes: 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+.
constexpr std::uint32_t hit_bucket(std::uint32_t hits) {
  if (hits <= 3) return hits - 1;
  if (hits < 8) return 3;
  if (hits < 16) return 4;
  if (hits < 32) return 5;
  if (hits < 128) return 6;
  return 7;
}

inline constexpr std::uint32_t kBucketsPerEdge = 8;

// One execution's outcome. `coverage` holds the set slots of the per-exec map
// in increasing order (the sparse form of a CoverageMap).
struct ExecResult {
  std::vector<std::uint32_t> coverage;
  bool crashed = false;
  std::optional<std::string> bug_id;
  std::uint64_t exec_index = 0;
};

// True iff `exec` sets a slot absent from `global`; `global` then becomes the
// union. Test and update happen in one pass.
inline bool is_interesting(CoverageMap& global, const std::vector<std::uint32_t>& slots) {
  bool fresh = false;
  for (std::uint32_t s : slots) fresh = global.set(s) || fresh;
  return fresh;
}

inline bool is_interesting(CoverageMap& global, const ExecResult& exec) { return is_interesting(global, exec.coverage); }

}  // namespace pairfuzz
