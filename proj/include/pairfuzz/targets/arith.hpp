#pragma once

#include <array>

#include "pairfuzz/target.hpp"

namespace pairfuzz::targets {

// arith: fixed-width capture records, loosely modelled on a pcap packet
// header where the captured length must track the wire length.
//
//   input  := 'A' 'R' count record[count]      (size must be exactly 3 + 6*count)
//   record := kind len:u16be caplen:u16be flags
//
// Records 0..2 have their own edges; records 3..7 share slot 3. A record is
// valid when caplen <= len and len - caplen <= 64. Valid records hit one of
// 128 band edges for len / 64 (len >= 8192 hits a shared overflow edge).
//
// Climbing the band ladder means growing len by up to 64 while keeping caplen
// within 64 below it, so productive inputs come from several small arithmetic
// edits stacked in one sequence (len, then caplen). Any change of the input
// size is rejected outright.
//
// Bug ARI001: record 0 of kind 3 with len in band 100 and caplen == len.
class Arith final : public Target {
 public:
  static constexpr std::size_t kRecordSize = 6;
  static constexpr std::size_t kHeaderSize = 3;
  static constexpr std::size_t kMaxRecords = 8;
  static constexpr std::size_t kSlots = 4;
  static constexpr unsigned kBandWidth = 64;
  static constexpr unsigned kBands = 128;
  static constexpr unsigned kMaxGap = 64;
  static constexpr unsigned kBugBand = 100;

  Arith() {
    entry_ = t_.add("entry", "parser entered");
    magic_[0] = t_.add("magic_0", "first magic byte 'A'");
    magic_[1] = t_.add("magic_1", "second magic byte 'R'");
    magic_bad_ = t_.add("magic_bad", "magic mismatch");
    no_count_ = t_.add("no_count", "input ends before the record count");
    zero_records_ = t_.add("zero_records", "record count 0");
    too_many_ = t_.add("too_many", "record count above 8");
    size_short_ = t_.add("size_short", "input shorter than the declared records");
    size_long_ = t_.add("size_long", "input longer than the declared records");
    for (std::size_t c = 1; c <= kMaxRecords; ++c)
      count_[c - 1] = t_.add("count_" + std::to_string(c), "exactly " + std::to_string(c) + " records");
    for (std::size_t s = 0; s < kSlots; ++s) {
      const std::string slot = "r" + std::to_string(s) + "_";
      for (int k = 0; k < 4; ++k)
        kind_[s][k] = t_.add(slot + "kind_" + std::to_string(k), "record kind (byte & 3) == " + std::to_string(k));
      caplen_over_[s] = t_.add(slot + "caplen_over", "caplen greater than len");
      gap_over_[s] = t_.add(slot + "gap_over", "len - caplen above 64");
      static constexpr std::array<const char*, 4> gaps = {"gap_0", "gap_1_16", "gap_17_32", "gap_33_64"};
      for (int g = 0; g < 4; ++g) gap_[s][g] = t_.add(slot + gaps[g], std::string("len - caplen in class ") + gaps[g]);
      for (int f = 0; f < 2; ++f)
        flag_[s][f] = t_.add(slot + "flag_" + std::to_string(f), "flag bit " + std::to_string(f) + " set on a valid record");
      for (unsigned b = 0; b < kBands; ++b)
        band_[s][b] = t_.add(slot + "band_" + std::to_string(b),
                             "valid record with len in [" + std::to_string(b * kBandWidth) + ", " +
                                 std::to_string((b + 1) * kBandWidth) + ")");
      band_overflow_[s] = t_.add(slot + "band_overflow", "valid record with len >= 8192");
    }
    bug_ = t_.add("bug_ari001", "record 0: kind 3, len band 100, caplen == len (ARI001)");
  }

  std::string_view name() const override { return "arith"; }
  const EdgeTable& edges() const override { return t_; }

  void run(ByteView in, Probe& p) const override {
    p.hit(entry_);
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < 2; ++i) {
      if (i >= n || in[i] != "AR"[i]) {
        p.hit(magic_bad_);
        return;
      }
      p.hit(magic_[i]);
    }
    if (n < kHeaderSize) {
      p.hit(no_count_);
      return;
    }
    const std::size_t count = in[2];
    if (count == 0) {
      p.hit(zero_records_);
      return;
    }
    if (count > kMaxRecords) {
      p.hit(too_many_);
      return;
    }
    const std::size_t expected = kHeaderSize + kRecordSize * count;
    if (n != expected) {
      p.hit(n < expected ? size_short_ : size_long_);
      return;
    }
    p.hit(count_[count - 1]);

    for (std::size_t r = 0; r < count; ++r) {
      const std::uint8_t* rec = in.data() + kHeaderSize + r * kRecordSize;
      const std::size_t s = std::min(r, kSlots - 1);
      const unsigned kind = rec[0] & 3u;
      const unsigned len = static_cast<unsigned>(rec[1]) << 8 | rec[2];
      const unsigned caplen = static_cast<unsigned>(rec[3]) << 8 | rec[4];
      p.hit(kind_[s][kind]);
      if (caplen > len) {
        p.hit(caplen_over_[s]);
        continue;
      }
      const unsigned gap = len - caplen;
      if (gap > kMaxGap) {
        p.hit(gap_over_[s]);
        continue;
      }
      p.hit(gap_[s][gap == 0 ? 0 : gap <= 16 ? 1 : gap <= 32 ? 2 : 3]);
      if (rec[5] & 1u) p.hit(flag_[s][0]);
      if (rec[5] & 2u) p.hit(flag_[s][1]);
      const unsigned band = len / kBandWidth;
      if (band < kBands)
        p.hit(band_[s][band]);
      else
        p.hit(band_overflow_[s]);
      if (r == 0 && kind == 3 && band == kBugBand && gap == 0) {
        p.hit(bug_);
        p.crash("ARI001");
      }
    }
  }

  std::vector<Bytes> seeds() const override {
    return {make({{0, 100, 90, 0}, {1, 200, 200, 0}, {2, 64, 40, 0}, {3, 1000, 990, 0}}),
            make({{1, 300, 260, 0}, {0, 20, 20, 0}})};
  }

  std::vector<Bytes> tokens() const override { return {{'A', 'R'}}; }

  std::vector<BugInfo> bugs() const override {
    return {{"ARI001", "record 0 of kind 3 with len in [6400, 6464) and caplen == len"}};
  }

  struct Record {
    std::uint8_t kind;
    std::uint16_t len;
    std::uint16_t caplen;
    std::uint8_t flags;
  };

  static Bytes make(const std::vector<Record>& records) {
    Bytes out = {'A', 'R', static_cast<std::uint8_t>(records.size())};
    for (const Record& r : records) {
      out.push_back(r.kind);
      out.push_back(static_cast<std::uint8_t>(r.len >> 8));
      out.push_back(static_cast<std::uint8_t>(r.len));
      out.push_back(static_cast<std::uint8_t>(r.caplen >> 8));
      out.push_back(static_cast<std::uint8_t>(r.caplen));
      out.push_back(r.flags);
    }
    return out;
  }

 private:
  EdgeTable t_;
  EdgeId entry_, magic_bad_, no_count_, zero_records_, too_many_, size_short_, size_long_, bug_;
  std::array<EdgeId, 2> magic_{};
  std::array<EdgeId, kMaxRecords> count_{};
  std::array<std::array<EdgeId, 4>, kSlots> kind_{}, gap_{};
  std::array<std::array<EdgeId, 2>, kSlots> flag_{};
  std::array<EdgeId, kSlots> caplen_over_{}, gap_over_{}, band_overflow_{};
  std::array<std::array<EdgeId, kBands>, kSlots> band_{};
};

}  // namespace pairfuzz::targets
