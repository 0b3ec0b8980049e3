#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pairfuzz/bytes.hpp"
#include "pairfuzz/rng.hpp"

namespace pairfuzz {

inline constexpr int kMutatorCount = 32;

enum class MutatorKind { unit, chunk };

// Identifier of one havoc mutator, 1-based as in the AFL++ mutator table.
class MutatorId {
 public:
  constexpr MutatorId() = default;
  constexpr explicit MutatorId(int id) : id_(id) {
    if (id < 1 || id > kMutatorCount) throw std::out_of_range("mutator id out of range: " + std::to_string(id));
  }

  constexpr int value() const { return id_; }
  constexpr std::size_t index() const { return static_cast<std::size_t>(id_ - 1); }
  constexpr MutatorKind kind() const { return id_ <= 20 ? MutatorKind::unit : MutatorKind::chunk; }

  static constexpr MutatorId from_index(std::size_t i) { return MutatorId(static_cast<int>(i) + 1); }

  friend constexpr bool operator==(MutatorId, MutatorId) = default;
  friend constexpr auto operator<=>(MutatorId, MutatorId) = default;

 private:
  int id_ = 1;
};

using MutatorSequence = std::vector<MutatorId>;

inline std::string_view mutator_name(MutatorId id) {
  static constexpr std::array<std::string_view, kMutatorCount> names = {
      "flip_bit",         "interesting8",      "interesting16",      "interesting16_be", "interesting32",
      "interesting32_be", "sub8",              "add8",               "sub16",            "sub16_be",
      "add16",            "add16_be",          "sub32",              "sub32_be",         "add32",
      "add32_be",         "random_byte",       "inc_byte",           "dec_byte",         "invert_byte",
      "swap_blocks",      "delete_block",      "overwrite_dict",     "insert_dict",      "overwrite_auto_dict",
      "insert_auto_dict", "overwrite_corpus",  "insert_corpus",      "clone_block",      "insert_constant",
      "overwrite_copy",   "overwrite_fixed"};
  return names[id.index()];
}

// "3-9-9-9"
inline std::string format_sequence(std::span<const MutatorId> seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(seq[i].value());
  }
  return out;
}

inline MutatorSequence parse_sequence(std::string_view text) {
  MutatorSequence seq;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('-', pos);
    if (end == std::string_view::npos) end = text.size();
    seq.emplace_back(std::stoi(std::string(text.substr(pos, end - pos))));
    pos = end + 1;
  }
  return seq;
}

// Interesting values, stored two's complement. Each wider table extends the
// narrower one.
inline constexpr std::array<std::int8_t, 9> kInteresting8 = {-128, -1, 0, 1, 16, 32, 64, 100, 127};
inline constexpr std::array<std::int16_t, 19> kInteresting16 = {-128, -1,  0,   1,   16,   32,   64,
                                                                 100,  127, -32768, -129, 128, 255, 256,
                                                                 512,  1000, 1024, 4096, 32767};
inline constexpr std::array<std::int32_t, 27> kInteresting32 = {
    -128,  -1,   0,    1,    16,    32,   64,   100,  127,         -32768,     -129,   128,   255,   256,
    512,   1000, 1024, 4096, 32767, INT32_MIN, -100663046, -32769, 32768, 65535, 65536, 100663045, INT32_MAX};

inline constexpr int kMaxArithDelta = 35;

// Selection weights per mutator. Probabilities are the normalized weights.
class WeightTable {
 public:
  WeightTable() { weights_.fill(1.0); }
  explicit WeightTable(const std::array<double, kMutatorCount>& w) : weights_(w) { validate(); }

  double weight(MutatorId id) const { return weights_[id.index()]; }
  void set_weight(MutatorId id, double w) {
    weights_[id.index()] = w;
    validate();
  }

  double total() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }
  double probability(MutatorId id) const { return weights_[id.index()] / total(); }
  const std::array<double, kMutatorCount>& weights() const { return weights_; }

  static WeightTable uniform() { return WeightTable(); }

 private:
  void validate() const {
    bool any = false;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw std::invalid_argument("mutator weights must be nonnegative");
      any = any || w > 0.0;
    }
    if (!any) throw std::invalid_argument("at least one mutator weight must be positive");
  }

  std::array<double, kMutatorCount> weights_;
};

// Weights proportional to the bar lengths (mm) printed in the AFL++ mutator
// table; normalizing them recovers the five printed probabilities.
inline WeightTable default_weight_table() {
  return WeightTable({7.9, 6.4, 4.3, 4.3, 4.3, 4.3, 6.4, 7.1, 4.3, 4.3, 4.3, 4.3, 4.3, 4.3, 4.3, 4.3,
                      6.4, 4.3, 4.3, 2.9, 4.3, 6.4, 7.1, 8.6, 6.4, 7.9, 9.3, 10.0, 10.0, 5.0, 7.1, 3.6});
}

// Inverse-CDF sampler over a fixed finite support.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(std::span<const double> weights) : cumulative_(weights.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      cumulative_[i] = acc;
    }
    if (!(acc > 0.0)) throw std::invalid_argument("sampler needs positive total weight");
  }

  template <RandomSource R>
  std::size_t sample(R& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    // Zero-weight entries share the cumulative value of their predecessor and
    // can never be returned by upper_bound.
    return static_cast<std::size_t>(it - cumulative_.begin());
  }

  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

// Read access to other seeds, for the two corpus mutators.
struct CorpusView {
  std::size_t size = 0;
  std::function<ByteView(std::size_t)> at;

  bool empty() const { return size == 0; }
};

struct MutationContext {
  std::vector<Bytes> dictionary;
  std::vector<Bytes> auto_dictionary;
  CorpusView corpus;
  std::size_t max_input_size = kDefaultMaxInputSize;
};

namespace detail {

struct Block {
  std::size_t offset;
  std::size_t size;
};

// offset uniform in [0, n-1], size uniform in [1, min(n - offset, max(1, n/2))]
template <RandomSource R>
Block pick_block(std::size_t n, R& rng) {
  const std::size_t offset = rng.below(n);
  const std::size_t limit = std::min(n - offset, std::max<std::size_t>(1, n / 2));
  return {offset, 1 + static_cast<std::size_t>(rng.below(limit))};
}

inline std::uint32_t load(const std::uint8_t* p, int width, bool big_endian) {
  std::uint32_t v = 0;
  for (int i = 0; i < width; ++i) {
    const int shift = big_endian ? 8 * (width - 1 - i) : 8 * i;
    v |= static_cast<std::uint32_t>(p[i]) << shift;
  }
  return v;
}

inline void store(std::uint8_t* p, std::uint32_t v, int width, bool big_endian) {
  for (int i = 0; i < width; ++i) {
    const int shift = big_endian ? 8 * (width - 1 - i) : 8 * i;
    p[i] = static_cast<std::uint8_t>(v >> shift);
  }
}

inline void insert_with_cap(Bytes& buf, std::size_t pos, ByteView data, std::size_t max_size) {
  buf.insert(buf.begin() + static_cast<std::ptrdiff_t>(pos), data.begin(), data.end());
  if (buf.size() > max_size) buf.resize(max_size);
}

template <RandomSource R>
std::uint8_t fixed_byte(const Bytes& buf, R& rng) {
  if (rng.below(2) != 0) return static_cast<std::uint8_t>(rng.below(256));
  return buf[rng.below(buf.size())];
}

// Degradation targets for multi-byte unit mutators on inputs shorter than the
// operand width: 32 -> 16 -> 8 bit, keeping endianness and direction.
constexpr int narrower(int id) {
  switch (id) {
    case 3: case 4: return 2;
    case 5: return 3;
    case 6: return 4;
    case 9: case 10: return 7;
    case 11: case 12: return 8;
    case 13: return 9;
    case 14: return 10;
    case 15: return 11;
    case 16: return 12;
    default: return id;
  }
}

constexpr int operand_width(int id) {
  if (id == 3 || id == 4 || (id >= 9 && id <= 12)) return 2;
  if (id == 5 || id == 6 || (id >= 13 && id <= 16)) return 4;
  return 1;
}

}  // namespace detail

// Applies mutator `requested` to `buf` in place and returns the id that was
// actually applied (differs from `requested` only when a fallback kicked in).
//
// Random draws, in order, per mutator (n = buf.size()):
//   1        bit = below(8n); byte bit/8 ^= 1 << (bit % 8)
//   2,3-6    pos = below(n - w + 1), value index = below(|table|)
//   7-16     pos = below(n - w + 1), delta = 1 + below(35); wraps mod 2^(8w)
//   17       pos = below(n), byte ^= 1 + below(255)
//   18-20    pos = below(n)
//   21       block = pick_block(n), other = below(n - size + 1)
//   22       block = pick_block(n)                       (no-op when n == 1)
//   23-26    entry = below(|dict|), pos = below(n - w + 1) or below(n + 1)
//   27,28    seed = below(|corpus|), block = pick_block(|seed|), pos
//   29       block = pick_block(n), pos = below(n + 1)
//   30       size = 1 + below(max(1, n/2)), pos = below(n + 1), fixed byte
//   31       block = pick_block(n), pos = below(n - size + 1)
//   32       block = pick_block(n), fixed byte
// where a fixed byte is below(2) ? below(256) : buf[below(n)].
//
// Fallbacks: widths larger than the input narrow to the next smaller operand;
// dictionary mutators with an empty dictionary become 17; corpus mutators with
// an empty corpus view become 29.
template <RandomSource R>
MutatorId mutate_in_place(MutatorId requested, Bytes& buf, const MutationContext& ctx, R& rng) {
  if (buf.empty()) throw std::invalid_argument("mutators require a nonempty input");
  int id = requested.value();
  const std::size_t n = buf.size();

  while (detail::operand_width(id) > static_cast<int>(n)) id = detail::narrower(id);
  if ((id == 23 || id == 24) && ctx.dictionary.empty()) id = 17;
  if ((id == 25 || id == 26) && ctx.auto_dictionary.empty()) id = 17;
  if ((id == 27 || id == 28) && ctx.corpus.empty()) id = 29;

  std::uint8_t* data = buf.data();
  switch (id) {
    case 1: {
      const std::size_t bit = rng.below(8 * n);
      data[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      break;
    }
    case 2: {
      const std::size_t pos = rng.below(n);
      data[pos] = static_cast<std::uint8_t>(kInteresting8[rng.below(kInteresting8.size())]);
      break;
    }
    case 3:
    case 4: {
      const std::size_t pos = rng.below(n - 1);
      const auto v = static_cast<std::uint16_t>(kInteresting16[rng.below(kInteresting16.size())]);
      detail::store(data + pos, v, 2, id == 4);
      break;
    }
    case 5:
    case 6: {
      const std::size_t pos = rng.below(n - 3);
      const auto v = static_cast<std::uint32_t>(kInteresting32[rng.below(kInteresting32.size())]);
      detail::store(data + pos, v, 4, id == 6);
      break;
    }
    case 7:
    case 8: {
      const std::size_t pos = rng.below(n);
      const auto delta = static_cast<std::uint8_t>(1 + rng.below(kMaxArithDelta));
      data[pos] = static_cast<std::uint8_t>(id == 8 ? data[pos] + delta : data[pos] - delta);
      break;
    }
    case 9: case 10: case 11: case 12:
    case 13: case 14: case 15: case 16: {
      const int width = detail::operand_width(id);
      const bool big_endian = id % 2 == 0;
      const bool add = id == 11 || id == 12 || id == 15 || id == 16;
      const std::size_t pos = rng.below(n - static_cast<std::size_t>(width) + 1);
      const auto delta = static_cast<std::uint32_t>(1 + rng.below(kMaxArithDelta));
      std::uint32_t v = detail::load(data + pos, width, big_endian);
      v = add ? v + delta : v - delta;
      detail::store(data + pos, v, width, big_endian);  // store truncates to width
      break;
    }
    case 17: {
      const std::size_t pos = rng.below(n);
      data[pos] ^= static_cast<std::uint8_t>(1 + rng.below(255));
      break;
    }
    case 18: ++data[rng.below(n)]; break;
    case 19: --data[rng.below(n)]; break;
    case 20: data[rng.below(n)] ^= 0xFF; break;
    case 21: {
      const auto block = detail::pick_block(n, rng);
      const std::size_t other = rng.below(n - block.size + 1);
      const Bytes snapshot(buf);
      std::memcpy(data + block.offset, snapshot.data() + other, block.size);
      std::memcpy(data + other, snapshot.data() + block.offset, block.size);
      break;
    }
    case 22: {
      if (n == 1) break;
      const auto block = detail::pick_block(n, rng);
      buf.erase(buf.begin() + static_cast<std::ptrdiff_t>(block.offset),
                buf.begin() + static_cast<std::ptrdiff_t>(block.offset + block.size));
      break;
    }
    case 23:
    case 25: {
      const auto& dict = id == 23 ? ctx.dictionary : ctx.auto_dictionary;
      const Bytes& entry = dict[rng.below(dict.size())];
      const std::size_t w = std::min(entry.size(), n);
      const std::size_t pos = rng.below(n - w + 1);
      std::memcpy(data + pos, entry.data(), w);
      break;
    }
    case 24:
    case 26: {
      const auto& dict = id == 24 ? ctx.dictionary : ctx.auto_dictionary;
      const Bytes& entry = dict[rng.below(dict.size())];
      const std::size_t pos = rng.below(n + 1);
      detail::insert_with_cap(buf, pos, entry, ctx.max_input_size);
      break;
    }
    case 27:
    case 28: {
      const ByteView source = ctx.corpus.at(rng.below(ctx.corpus.size));
      if (source.empty()) break;
      auto block = detail::pick_block(source.size(), rng);
      const ByteView piece = source.subspan(block.offset, block.size);
      if (id == 27) {
        const std::size_t w = std::min(piece.size(), n);
        const std::size_t pos = rng.below(n - w + 1);
        std::memmove(data + pos, piece.data(), w);
      } else {
        const Bytes copy(piece.begin(), piece.end());
        detail::insert_with_cap(buf, rng.below(n + 1), copy, ctx.max_input_size);
      }
      break;
    }
    case 29: {
      const auto block = detail::pick_block(n, rng);
      const std::size_t pos = rng.below(n + 1);
      const Bytes copy(buf.begin() + static_cast<std::ptrdiff_t>(block.offset),
                       buf.begin() + static_cast<std::ptrdiff_t>(block.offset + block.size));
      detail::insert_with_cap(buf, pos, copy, ctx.max_input_size);
      break;
    }
    case 30: {
      const std::size_t size = 1 + rng.below(std::max<std::size_t>(1, n / 2));
      const std::size_t pos = rng.below(n + 1);
      const Bytes fill(size, detail::fixed_byte(buf, rng));
      detail::insert_with_cap(buf, pos, fill, ctx.max_input_size);
      break;
    }
    case 31: {
      const auto block = detail::pick_block(n, rng);
      const std::size_t pos = rng.below(n - block.size + 1);
      std::memmove(data + pos, data + block.offset, block.size);
      break;
    }
    case 32: {
      const auto block = detail::pick_block(n, rng);
      const std::uint8_t value = detail::fixed_byte(buf, rng);
      std::memset(data + block.offset, value, block.size);
      break;
    }
    default:
      throw std::logic_error("unreachable mutator id");
  }
  return MutatorId(id);
}

struct MutationResult {
  Bytes bytes;
  MutatorId effective;
};

template <RandomSource R>
MutationResult apply_mutator(MutatorId id, ByteView input, const MutationContext& ctx, R& rng) {
  MutationResult result{Bytes(input.begin(), input.end()), id};
  if (result.bytes.size() > ctx.max_input_size) result.bytes.resize(ctx.max_input_size);
  result.effective = mutate_in_place(id, result.bytes, ctx, rng);
  return result;
}

// Applies a whole sequence in order. `effective` receives the ids actually
// applied, one per requested mutator.
template <RandomSource R>
void apply_sequence(std::span<const MutatorId> sequence, Bytes& buf, const MutationContext& ctx, R& rng,
                    MutatorSequence& effective) {
  effective.clear();
  for (MutatorId id : sequence) effective.push_back(mutate_in_place(id, buf, ctx, rng));
}

// AFL++ havoc stack depth: 1 << (1 + rand(4)), i.e. {2, 4, 8, 16} uniformly.
template <RandomSource R>
int sample_default_length(R& rng) {
  return 1 << (1 + static_cast<int>(rng.below(4)));
}

// The fixed-probability baseline: length from the default scheme, each
// element drawn independently from the normalized weights.
template <RandomSource R>
MutatorSequence generate_sequence_fixed(const DiscreteSampler& weights, R& rng) {
  const int length = sample_default_length(rng);
  MutatorSequence seq;
  seq.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) seq.push_back(MutatorId::from_index(weights.sample(rng)));
  return seq;
}

template <RandomSource R>
MutatorSequence generate_sequence_fixed(const WeightTable& weights, R& rng) {
  return generate_sequence_fixed(DiscreteSampler(weights.weights()), rng);
}

}  // namespace pairfuzz
