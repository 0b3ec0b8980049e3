// Byte-exact mutator cases under scripted draws, shared by the unit tests and
// the acceptance run. Every expected buffer was worked out by hand from the
// mutator definitions.
#pragma once

#include <string>
#include <vector>

#include "pairfuzz/mutators.hpp"
#include "scripted_rng.hpp"

namespace conformance {

using namespace pairfuzz;

enum class Ctx { normal, no_dict, no_corpus };

struct Case {
  int id;
  Bytes in;
  std::size_t max;  // max_input_size
  std::vector<ScriptedRng::Draw> script;
  Bytes out;
  int effective;
  Ctx ctx = Ctx::normal;
};

inline constexpr std::size_t kBig = 4096;

inline const std::vector<Bytes>& corpus_seeds() {
  static const std::vector<Bytes> seeds = {{1, 2, 3, 4}, {9}};
  return seeds;
}

inline MutationContext make_ctx(Ctx kind, std::size_t max) {
  MutationContext ctx;
  ctx.max_input_size = max;
  if (kind != Ctx::no_dict) {
    ctx.dictionary = {{'A', 'B'}, {'Z'}};
    ctx.auto_dictionary = {{'C', 'H', 'K'}, {'x'}};
  }
  if (kind != Ctx::no_corpus)
    ctx.corpus = {corpus_seeds().size(), [](std::size_t i) { return ByteView(corpus_seeds()[i]); }};
  return ctx;
}

inline const std::vector<Case>& cases() {
  static const std::vector<Case> c = {
      // 1 flip_bit
      {1, {0x00}, kBig, {{8, 3}}, {0x08}, 1},
      {1, {0x00, 0xFF, 0x10}, kBig, {{24, 13}}, {0x00, 0xDF, 0x10}, 1},
      {1, {1, 2, 3, 4}, 4, {{32, 31}}, {1, 2, 3, 0x84}, 1},
      // 2 interesting8
      {2, {0x55}, kBig, {{1, 0}, {9, 0}}, {0x80}, 2},
      {2, {0, 0, 0}, kBig, {{3, 2}, {9, 7}}, {0, 0, 0x64}, 2},
      {2, {1, 2, 3, 4}, 4, {{4, 1}, {9, 1}}, {1, 0xFF, 3, 4}, 2},
      // 3 interesting16 little endian
      {3, {0x55}, kBig, {{1, 0}, {9, 8}}, {0x7F}, 2},
      {3, {0, 0, 0}, kBig, {{2, 1}, {19, 9}}, {0x00, 0x00, 0x80}, 3},
      {3, {1, 2, 3, 4}, 4, {{3, 0}, {19, 16}}, {0x00, 0x04, 3, 4}, 3},
      // 4 interesting16 big endian
      {4, {0x55}, kBig, {{1, 0}, {9, 3}}, {0x01}, 2},
      {4, {0, 0, 0}, kBig, {{2, 1}, {19, 10}}, {0x00, 0xFF, 0x7F}, 4},
      {4, {1, 2, 3, 4}, 4, {{3, 2}, {19, 18}}, {1, 2, 0x7F, 0xFF}, 4},
      // 5 interesting32 little endian
      {5, {0x55}, kBig, {{1, 0}, {9, 4}}, {0x10}, 2},
      {5, {0, 0, 0}, kBig, {{2, 1}, {19, 12}}, {0x00, 0xFF, 0x00}, 3},
      {5, {0, 0, 0, 0, 0}, 5, {{2, 1}, {27, 20}}, {0x00, 0xFA, 0x00, 0x00, 0xFA}, 5},
      // 6 interesting32 big endian
      {6, {0x55}, kBig, {{1, 0}, {9, 2}}, {0x00}, 2},
      {6, {0, 0}, kBig, {{1, 0}, {19, 13}}, {0x01, 0x00}, 4},
      {6, {0, 0, 0, 0}, 4, {{1, 0}, {27, 25}}, {0x05, 0xFF, 0xFF, 0x05}, 6},
      // 7 sub8
      {7, {0x00}, kBig, {{1, 0}, {35, 0}}, {0xFF}, 7},
      {7, {10, 20, 30}, kBig, {{3, 1}, {35, 34}}, {10, 0xF1, 30}, 7},
      {7, {1, 2, 3, 4}, 4, {{4, 3}, {35, 2}}, {1, 2, 3, 1}, 7},
      // 8 add8
      {8, {0xFF}, kBig, {{1, 0}, {35, 0}}, {0x00}, 8},
      {8, {10, 20, 30}, kBig, {{3, 2}, {35, 4}}, {10, 20, 35}, 8},
      {8, {1, 2, 3, 250}, 4, {{4, 3}, {35, 9}}, {1, 2, 3, 4}, 8},
      // 9 sub16 little endian
      {9, {0x05}, kBig, {{1, 0}, {35, 1}}, {0x03}, 7},
      {9, {0x00, 0x01, 0x00}, kBig, {{2, 0}, {35, 0}}, {0xFF, 0x00, 0x00}, 9},
      {9, {0, 0, 0, 0}, 4, {{3, 2}, {35, 0}}, {0, 0, 0xFF, 0xFF}, 9},
      // 10 sub16 big endian
      {10, {0x05}, kBig, {{1, 0}, {35, 4}}, {0x00}, 7},
      {10, {0x01, 0x00, 0x07}, kBig, {{2, 0}, {35, 0}}, {0x00, 0xFF, 0x07}, 10},
      {10, {1, 2, 3, 4}, 4, {{3, 1}, {35, 2}}, {1, 0x02, 0x00, 4}, 10},
      // 11 add16 little endian
      {11, {0xFE}, kBig, {{1, 0}, {35, 2}}, {0x01}, 8},
      {11, {0xFF, 0x00, 0x09}, kBig, {{2, 0}, {35, 0}}, {0x00, 0x01, 0x09}, 11},
      {11, {0xFF, 0xFF, 0, 0}, 4, {{3, 0}, {35, 1}}, {0x01, 0x00, 0, 0}, 11},
      // 12 add16 big endian
      {12, {0x10}, kBig, {{1, 0}, {35, 15}}, {0x20}, 8},
      {12, {0x00, 0xFF, 0x09}, kBig, {{2, 0}, {35, 0}}, {0x01, 0x00, 0x09}, 12},
      {12, {1, 2, 3, 4}, 4, {{3, 2}, {35, 34}}, {1, 2, 0x03, 0x27}, 12},
      // 13 sub32 little endian
      {13, {0x05}, kBig, {{1, 0}, {35, 0}}, {0x04}, 7},
      {13, {0x00, 0x01}, kBig, {{1, 0}, {35, 0}}, {0xFF, 0x00}, 9},
      {13, {0, 0, 0, 0}, 4, {{1, 0}, {35, 0}}, {0xFF, 0xFF, 0xFF, 0xFF}, 13},
      // 14 sub32 big endian
      {14, {0x05}, kBig, {{1, 0}, {35, 5}}, {0xFF}, 7},
      {14, {0x01, 0x00, 0x00}, kBig, {{2, 0}, {35, 0}}, {0x00, 0xFF, 0x00}, 10},
      {14, {9, 0, 0, 1, 0}, 5, {{2, 1}, {35, 1}}, {9, 0x00, 0x00, 0x00, 0xFE}, 14},
      // 15 add32 little endian
      {15, {0x01}, kBig, {{1, 0}, {35, 0}}, {0x02}, 8},
      {15, {0xFF, 0x00}, kBig, {{1, 0}, {35, 0}}, {0x00, 0x01}, 11},
      {15, {0xFF, 0xFF, 0xFF, 0xFF}, 4, {{1, 0}, {35, 0}}, {0, 0, 0, 0}, 15},
      // 16 add32 big endian
      {16, {0x01}, kBig, {{1, 0}, {35, 1}}, {0x03}, 8},
      {16, {0x00, 0xFF}, kBig, {{1, 0}, {35, 0}}, {0x01, 0x00}, 12},
      {16, {0, 0, 0, 0xFF, 7}, 5, {{2, 0}, {35, 0}}, {0, 0, 1, 0, 7}, 16},
      // 17 random_byte (xor with 1..255)
      {17, {0x0F}, kBig, {{1, 0}, {255, 0xEF}}, {0xFF}, 17},
      {17, {1, 2, 3}, kBig, {{3, 1}, {255, 254}}, {1, 0xFD, 3}, 17},
      {17, {0, 0, 0, 0}, 4, {{4, 3}, {255, 0}}, {0, 0, 0, 1}, 17},
      // 18 inc_byte
      {18, {0xFF}, kBig, {{1, 0}}, {0x00}, 18},
      {18, {1, 2, 3}, kBig, {{3, 2}}, {1, 2, 4}, 18},
      {18, {0, 0, 0, 0x7F}, 4, {{4, 3}}, {0, 0, 0, 0x80}, 18},
      // 19 dec_byte
      {19, {0x00}, kBig, {{1, 0}}, {0xFF}, 19},
      {19, {1, 2, 3}, kBig, {{3, 0}}, {0, 2, 3}, 19},
      {19, {5, 5, 5, 5}, 4, {{4, 1}}, {5, 4, 5, 5}, 19},
      // 20 invert_byte
      {20, {0x0F}, kBig, {{1, 0}}, {0xF0}, 20},
      {20, {0, 1, 2}, kBig, {{3, 1}}, {0, 0xFE, 2}, 20},
      {20, {1, 2, 3, 4}, 4, {{4, 3}}, {1, 2, 3, 0xFB}, 20},
      // 21 swap_blocks (overlapping blocks copy through a snapshot)
      {21, {7}, kBig, {{1, 0}, {1, 0}, {1, 0}}, {7}, 21},
      {21, {1, 2, 3, 4, 5, 6}, kBig, {{6, 0}, {3, 1}, {5, 3}}, {4, 5, 3, 1, 2, 6}, 21},
      {21, {1, 2, 3, 4}, 4, {{4, 1}, {2, 1}, {3, 2}}, {1, 3, 2, 3}, 21},
      // 22 delete_block
      {22, {7}, kBig, {}, {7}, 22},
      {22, {1, 2, 3, 4, 5, 6}, kBig, {{6, 2}, {3, 2}}, {1, 2, 6}, 22},
      {22, {1, 2, 3, 4}, 4, {{4, 3}, {1, 0}}, {1, 2, 3}, 22},
      // 23 overwrite_dict
      {23, {0}, kBig, {{2, 0}, {1, 0}}, {'A'}, 23},
      {23, {0, 0, 0}, kBig, {{2, 0}, {2, 1}}, {0, 'A', 'B'}, 23},
      {23, {1, 2, 3, 4}, 4, {{2, 1}, {4, 3}}, {1, 2, 3, 'Z'}, 23},
      {23, {0}, kBig, {{1, 0}, {255, 4}}, {5}, 17, Ctx::no_dict},
      // 24 insert_dict
      {24, {9}, kBig, {{2, 1}, {2, 0}}, {'Z', 9}, 24},
      {24, {1, 2, 3}, kBig, {{2, 0}, {4, 3}}, {1, 2, 3, 'A', 'B'}, 24},
      {24, {1, 2, 3, 4}, 4, {{2, 0}, {5, 1}}, {1, 'A', 'B', 2}, 24},
      {24, {1, 2}, kBig, {{2, 1}, {255, 0}}, {1, 3}, 17, Ctx::no_dict},
      // 25 overwrite_auto_dict
      {25, {0}, kBig, {{2, 0}, {1, 0}}, {'C'}, 25},
      {25, {0, 0, 0, 0, 0}, kBig, {{2, 0}, {3, 2}}, {0, 0, 'C', 'H', 'K'}, 25},
      {25, {1, 2, 3, 4}, 4, {{2, 1}, {4, 0}}, {'x', 2, 3, 4}, 25},
      // 26 insert_auto_dict
      {26, {9}, kBig, {{2, 1}, {2, 1}}, {9, 'x'}, 26},
      {26, {1, 2}, kBig, {{2, 0}, {3, 0}}, {'C', 'H', 'K', 1, 2}, 26},
      {26, {1, 2, 3, 4}, 4, {{2, 1}, {5, 4}}, {1, 2, 3, 4}, 26},
      // 27 overwrite_corpus
      {27, {0}, kBig, {{2, 0}, {4, 1}, {2, 1}, {1, 0}}, {2}, 27},
      {27, {0, 0, 0, 0, 0}, kBig, {{2, 0}, {4, 0}, {2, 1}, {4, 3}}, {0, 0, 0, 1, 2}, 27},
      {27, {7, 7, 7, 7}, 4, {{2, 1}, {1, 0}, {1, 0}, {4, 1}}, {7, 9, 7, 7}, 27},
      {27, {5}, kBig, {{1, 0}, {1, 0}, {2, 0}}, {5, 5}, 29, Ctx::no_corpus},
      // 28 insert_corpus
      {28, {5}, kBig, {{2, 1}, {1, 0}, {1, 0}, {2, 1}}, {5, 9}, 28},
      {28, {5, 6}, kBig, {{2, 0}, {4, 2}, {2, 1}, {3, 1}}, {5, 3, 4, 6}, 28},
      {28, {1, 1, 1, 1}, 4, {{2, 0}, {4, 3}, {1, 0}, {5, 0}}, {4, 1, 1, 1}, 28},
      // 29 clone_block
      {29, {5}, kBig, {{1, 0}, {1, 0}, {2, 1}}, {5, 5}, 29},
      {29, {1, 2, 3, 4}, kBig, {{4, 1}, {2, 1}, {5, 4}}, {1, 2, 3, 4, 2, 3}, 29},
      {29, {1, 2, 3, 4}, 4, {{4, 0}, {2, 1}, {5, 0}}, {1, 2, 1, 2}, 29},
      // 30 insert_constant
      {30, {5}, kBig, {{1, 0}, {2, 0}, {2, 1}, {256, 0xAA}}, {0xAA, 5}, 30},
      {30, {1, 2, 3, 4}, kBig, {{2, 1}, {5, 2}, {2, 0}, {4, 3}}, {1, 2, 4, 4, 3, 4}, 30},
      {30, {1, 2, 3, 4}, 4, {{2, 0}, {5, 4}, {2, 1}, {256, 0}}, {1, 2, 3, 4}, 30},
      // 31 overwrite_copy
      {31, {5}, kBig, {{1, 0}, {1, 0}, {1, 0}}, {5}, 31},
      {31, {1, 2, 3, 4, 5, 6}, kBig, {{6, 0}, {3, 2}, {4, 3}}, {1, 2, 3, 1, 2, 3}, 31},
      {31, {1, 2, 3, 4}, 4, {{4, 2}, {2, 1}, {3, 0}}, {3, 4, 3, 4}, 31},
      // 32 overwrite_fixed
      {32, {5}, kBig, {{1, 0}, {1, 0}, {2, 1}, {256, 0x41}}, {0x41}, 32},
      {32, {1, 2, 3, 4, 5, 6}, kBig, {{6, 4}, {2, 1}, {2, 0}, {6, 0}}, {1, 2, 3, 4, 1, 1}, 32},
      {32, {1, 2, 3, 4}, 4, {{4, 0}, {2, 1}, {2, 1}, {256, 0xFF}}, {0xFF, 0xFF, 3, 4}, 32},
  };
  return c;
}

// Empty string on success, otherwise what went wrong.
inline std::string run_case(const Case& c) {
  try {
    ScriptedRng rng(c.script);
    const MutationContext ctx = make_ctx(c.ctx, c.max);
    Bytes buf = c.in;
    const MutatorId eff = mutate_in_place(MutatorId(c.id), buf, ctx, rng);
    if (buf != c.out) return "output bytes differ";
    if (eff.value() != c.effective) return "effective id " + std::to_string(eff.value());
    if (!rng.exhausted()) return "not every scripted draw was used";
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace conformance
