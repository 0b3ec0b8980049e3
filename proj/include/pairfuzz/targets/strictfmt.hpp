#pragma once

#include <array>

#include "pairfuzz/target.hpp"

namespace pairfuzz::targets {

// strictfmt: a rigid 24-byte header.
//
//   'S' 'T' 'R' 'F' version flags field[8]:u16le 0x0A 0x0D
//
// Every byte sits at a fixed offset, so inserting or deleting anything kills
// the input at the length check, and block copies mostly break the magic.
// Each field is compared against a constant; the comparison is split into
// 16 prefix edges (first k high bits equal), so single bit flips make
// steady progress without needing any particular mutator pairing.
//
// Bug STR001: all eight fields equal their constants and the trailer is valid.
class StrictFmt final : public Target {
 public:
  static constexpr std::size_t kSize = 24;
  static constexpr std::array<std::uint16_t, 8> kFieldKeys = {0x1F2E, 0x0440, 0xBEEF, 0x7A01,
                                                              0x0C0C, 0x8001, 0x5A5A, 0x00FF};

  StrictFmt() {
    entry_ = t_.add("entry", "parser entered");
    too_short_ = t_.add("too_short", "input shorter than 24 bytes");
    too_long_ = t_.add("too_long", "input longer than 24 bytes");
    for (int i = 0; i < 4; ++i) magic_[i] = t_.add("magic_" + std::to_string(i), "magic byte " + std::to_string(i) + " matches");
    magic_bad_ = t_.add("magic_bad", "magic mismatch");
    for (int v = 0; v < 3; ++v) version_[v] = t_.add("version_" + std::to_string(v + 1), "version " + std::to_string(v + 1));
    version_bad_ = t_.add("version_bad", "version outside 1..3");
    for (int b = 0; b < 8; ++b) flag_[b] = t_.add("flag_" + std::to_string(b), "flag bit " + std::to_string(b));
    for (int f = 0; f < 8; ++f)
      for (int k = 1; k <= 16; ++k)
        prefix_[f][k - 1] = t_.add("field" + std::to_string(f) + "_prefix_" + std::to_string(k),
                                   "field " + std::to_string(f) + " matches its key in the top " + std::to_string(k) + " bits");
    trailer_ok_ = t_.add("trailer_ok", "trailer bytes 0x0A 0x0D");
    trailer_bad_ = t_.add("trailer_bad", "trailer mismatch");
    bug_ = t_.add("bug_str001", "all fields match and trailer valid (STR001)");
  }

  std::string_view name() const override { return "strictfmt"; }
  const EdgeTable& edges() const override { return t_; }

  void run(ByteView in, Probe& p) const override {
    p.hit(entry_);
    if (in.size() != kSize) {
      p.hit(in.size() < kSize ? too_short_ : too_long_);
      return;
    }
    for (int i = 0; i < 4; ++i) {
      if (in[static_cast<std::size_t>(i)] != "STRF"[i]) {
        p.hit(magic_bad_);
        return;
      }
      p.hit(magic_[i]);
    }
    const unsigned version = in[4];
    if (version < 1 || version > 3) {
      p.hit(version_bad_);
      return;
    }
    p.hit(version_[version - 1]);
    for (int b = 0; b < 8; ++b)
      if (in[5] & (1u << b)) p.hit(flag_[b]);

    int full = 0;
    for (int f = 0; f < 8; ++f) {
      const std::size_t off = 6 + 2 * static_cast<std::size_t>(f);
      const unsigned value = in[off] | static_cast<unsigned>(in[off + 1]) << 8;
      const unsigned diff = value ^ kFieldKeys[static_cast<std::size_t>(f)];
      for (int k = 1; k <= 16; ++k) {
        if (diff >> (16 - k)) break;
        p.hit(prefix_[f][k - 1]);
      }
      if (diff == 0) ++full;
    }
    const bool trailer = in[22] == 0x0A && in[23] == 0x0D;
    p.hit(trailer ? trailer_ok_ : trailer_bad_);
    if (trailer && full == 8) {
      p.hit(bug_);
      p.crash("STR001");
    }
  }

  std::vector<Bytes> seeds() const override {
    Bytes s = {'S', 'T', 'R', 'F', 1, 0};
    s.resize(22, 0);
    s.push_back(0x0A);
    s.push_back(0x0D);
    return {s};
  }

  std::vector<Bytes> tokens() const override { return {{'S', 'T', 'R', 'F'}, {0x0A, 0x0D}}; }

  std::vector<BugInfo> bugs() const override { return {{"STR001", "every field equal to its key, valid trailer"}}; }

 private:
  EdgeTable t_;
  EdgeId entry_, too_short_, too_long_, magic_bad_, version_bad_, trailer_ok_, trailer_bad_, bug_;
  std::array<EdgeId, 4> magic_{};
  std::array<EdgeId, 3> version_{};
  std::array<EdgeId, 8> flag_{};
  std::array<std::array<EdgeId, 16>, 8> prefix_{};
};

}  // namespace pairfuzz::targets
