#pragma once

#include <array>
#include <cstdio>

#include "pairfuzz/target.hpp"

namespace pairfuzz::targets {

// chunkfmt: a PNG-flavoured chunk container.
//
//   input  := 'C' 'H' 'K' 0x89  stream
//   chunk  := 0xC3 type len payload[len] check
//   check  := sum(payload) mod 256          (the type byte is not covered)
//
// The stream is scanned byte by byte; a sync byte starts a chunk candidate and
// anything else is skipped as junk, so copied blocks that carry a whole chunk
// parse wherever they land. Valid chunks of type 'H', 'P', 'D', 'T', 'E' run
// a small handler each; other types are counted but have no handler.
//
// Two parts of the map reward a value edit on a type byte followed by a block
// copy of the edited chunk within the same sequence:
//   - dup2_xx: the second valid chunk of type xx.
//   - type_rung_k: a chain of chunk types starting at 0 where each link
//     raises the type by 1..4 (mod 256); rung k opens when the k-th link
//     appears twice. Since the check byte does not cover the type, the next
//     link is one type edit plus one copy away, and a lone renamed chunk adds
//     nothing.
//
// Bug CHK001: a third valid chunk of type 0xB7 once a header has been seen.
class ChunkFmt final : public Target {
 public:
  static constexpr std::array<std::uint8_t, 4> kMagic = {'C', 'H', 'K', 0x89};
  static constexpr std::uint8_t kSync = 0xC3;
  static constexpr std::uint8_t kBugType = 0xB7;
  static constexpr std::size_t kRungs = 192;
  static constexpr unsigned kMaxStride = 4;

  ChunkFmt() {
    entry_ = t_.add("entry", "parser entered");
    for (int i = 0; i < 4; ++i)
      magic_[i] = t_.add("magic_" + std::to_string(i), "magic byte " + std::to_string(i) + " matches");
    magic_bad_ = t_.add("magic_bad", "magic mismatch, input rejected");
    empty_stream_ = t_.add("empty_stream", "valid magic with no bytes after it");
    junk_ = t_.add("junk", "non-sync byte skipped while scanning");
    empty_payload_ = t_.add("empty_payload", "zero-length chunk of a type other than 'E'");
    truncated_ = t_.add("truncated", "chunk header whose payload or check byte runs past the end");
    bad_check_known_ = t_.add("bad_check_known", "checksum mismatch on a chunk of a known type");
    bad_check_unknown_ = t_.add("bad_check_unknown", "checksum mismatch on a chunk of an unknown type");
    valid_ = t_.add("chunk_valid", "chunk with a correct checksum");
    for (int i = 0; i < 4; ++i)
      count_[i] = t_.add("chunks_ge_" + std::to_string(2 << i), "at least " + std::to_string(2 << i) + " valid chunks");
    unknown_ancillary_ = t_.add("unknown_ancillary", "valid chunk of unknown type with bit 0x20 set");
    unknown_critical_ = t_.add("unknown_critical", "valid chunk of unknown type with bit 0x20 clear");

    hdr_short_ = t_.add("hdr_short", "header payload shorter than 4 bytes");
    hdr_first_ = t_.add("hdr_first", "header is the first valid chunk");
    hdr_late_ = t_.add("hdr_late", "header after another chunk");
    hdr_repeat_ = t_.add("hdr_repeat", "second header");
    hdr_zero_width_ = t_.add("hdr_zero_width", "header width 0");
    hdr_zero_height_ = t_.add("hdr_zero_height", "header height 0");
    hdr_large_ = t_.add("hdr_large", "header width*height above 4096");
    static constexpr std::array<int, 5> depths = {1, 2, 4, 8, 16};
    for (std::size_t i = 0; i < depths.size(); ++i)
      hdr_depth_[i] = t_.add("hdr_depth_" + std::to_string(depths[i]), "header bit depth " + std::to_string(depths[i]));
    hdr_bad_depth_ = t_.add("hdr_bad_depth", "header bit depth outside {1,2,4,8,16}");
    static constexpr std::array<int, 5> modes = {0, 2, 3, 4, 6};
    for (std::size_t i = 0; i < modes.size(); ++i)
      hdr_mode_[i] = t_.add("hdr_mode_" + std::to_string(modes[i]), "header colour mode " + std::to_string(modes[i]));
    hdr_bad_mode_ = t_.add("hdr_bad_mode", "header colour mode outside {0,2,3,4,6}");
    hdr_palette_deep_ = t_.add("hdr_palette_deep", "palette mode with depth 16");

    pal_before_hdr_ = t_.add("pal_before_hdr", "palette before header");
    pal_bad_len_ = t_.add("pal_bad_len", "palette length not a multiple of 3");
    pal_small_ = t_.add("pal_small", "palette with 1 entry");
    pal_medium_ = t_.add("pal_medium", "palette with 2-16 entries");
    pal_large_ = t_.add("pal_large", "palette with more than 16 entries");
    pal_unused_ = t_.add("pal_unused", "palette while header mode is not 3");

    data_before_hdr_ = t_.add("data_before_hdr", "data chunk before header");
    data_empty_ = t_.add("data_empty", "empty data chunk");
    for (int i = 0; i < 5; ++i)
      data_filter_[i] = t_.add("data_filter_" + std::to_string(i), "data row filter " + std::to_string(i));
    data_bad_filter_ = t_.add("data_bad_filter", "data row filter above 4");
    for (int i = 0; i < 4; ++i) {
      const int bound = 8 << (2 * i);
      data_total_[i] = t_.add("data_total_ge_" + std::to_string(bound), "accumulated data >= " + std::to_string(bound));
    }

    text_no_sep_ = t_.add("text_no_sep", "text chunk without '='");
    text_empty_key_ = t_.add("text_empty_key", "text chunk with empty key");
    text_long_key_ = t_.add("text_long_key", "text key longer than 4 bytes");
    text_pair_ = t_.add("text_pair", "well-formed key=value text");

    end_ = t_.add("end", "end chunk");
    end_before_data_ = t_.add("end_before_data", "end chunk before any data");
    trailing_ = t_.add("trailing", "bytes after the end chunk");
    no_header_ = t_.add("no_header", "stream finished without a header");
    no_end_ = t_.add("no_end", "stream finished without an end chunk");

    for (int t = 0; t < 256; ++t)
      dup2_[t] = t_.add(type_edge_name("dup2_", t), "second valid chunk of type " + std::to_string(t));
    for (std::size_t k = 1; k <= kRungs; ++k)
      rung_[k - 1] = t_.add("type_rung_" + std::to_string(k),
                            "type chain of " + std::to_string(k) + " links whose last link is repeated");
    bug_ = t_.add("bug_chk001", "third 0xB7 chunk after a header (CHK001)");
  }

  std::string_view name() const override { return "chunkfmt"; }
  const EdgeTable& edges() const override { return t_; }

  void run(ByteView in, Probe& p) const override {
    p.hit(entry_);
    const std::size_t n = in.size();
    if (n == 0) return;
    for (std::size_t i = 0; i < kMagic.size(); ++i) {
      if (i >= n || in[i] != kMagic[i]) {
        p.hit(magic_bad_);
        return;
      }
      p.hit(magic_[i]);
    }
    if (n == kMagic.size()) {
      p.hit(empty_stream_);
      return;
    }

    State s;
    std::size_t pos = kMagic.size();
    while (pos < n) {
      if (in[pos] != kSync || pos + 3 > n) {
        p.hit(junk_);
        ++pos;
        continue;
      }
      const std::uint8_t type = in[pos + 1];
      const std::size_t len = in[pos + 2];
      if (len == 0 && type != 'E') {
        p.hit(empty_payload_);
        ++pos;
        continue;
      }
      if (pos + 3 + len + 1 > n) {
        p.hit(truncated_);
        break;
      }
      const ByteView payload = in.subspan(pos + 3, len);
      unsigned sum = 0;
      for (std::uint8_t b : payload) sum += b;
      if ((sum & 0xFF) != in[pos + 3 + len]) {
        p.hit(is_known(type) ? bad_check_known_ : bad_check_unknown_);
        ++pos;
        continue;
      }
      pos += 3 + len + 1;
      if (!chunk(type, payload, s, p)) {
        if (pos < n) p.hit(trailing_);
        return;
      }
    }
    if (!s.header) p.hit(no_header_);
    p.hit(no_end_);
  }

  std::vector<Bytes> seeds() const override {
    Bytes a(kMagic.begin(), kMagic.end());
    append_chunk(a, 'H', {8, 8, 8, 2});
    append_chunk(a, 'D', {0, 1, 2, 3, 4, 5});
    append_chunk(a, 0x00, {'s'});
    append_chunk(a, 0x00, {'s'});
    append_chunk(a, 'E', {});
    Bytes b(kMagic.begin(), kMagic.end());
    append_chunk(b, 'H', {4, 4, 8, 3});
    append_chunk(b, 'P', {255, 0, 0, 0, 255, 0});
    append_chunk(b, 'D', {1, 9, 9, 9});
    append_chunk(b, 'T', {'k', '=', 'v'});
    append_chunk(b, 'E', {});
    return {a, b};
  }

  std::vector<Bytes> tokens() const override {
    return {Bytes(kMagic.begin(), kMagic.end()), {kSync, 'H'}, {kSync, 'P'}, {kSync, 'D'}, {kSync, 'T'}, {kSync, 'E'}};
  }

  std::vector<BugInfo> bugs() const override {
    return {{"CHK001", "three valid chunks of type 0xB7 after a header"}};
  }

  // Appends a well-formed chunk with a correct check byte.
  static void append_chunk(Bytes& out, std::uint8_t type, const Bytes& payload) {
    out.push_back(kSync);
    out.push_back(type);
    out.push_back(static_cast<std::uint8_t>(payload.size()));
    unsigned sum = 0;
    for (std::uint8_t b : payload) {
      out.push_back(b);
      sum += b;
    }
    out.push_back(static_cast<std::uint8_t>(sum & 0xFF));
  }

  EdgeId dup2_edge(std::uint8_t type) const { return dup2_[type]; }
  EdgeId rung_edge(std::size_t k) const { return rung_[k - 1]; }

 private:
  struct State {
    bool header = false;
    bool palette_mode = false;
    bool data = false;
    unsigned chunks = 0;
    std::size_t data_total = 0;
    std::array<std::uint8_t, 256> occurrences{};
    std::size_t chain = 0;
    unsigned last_type = 0;
    bool last_repeated = false;
  };

  static bool is_known(std::uint8_t t) { return t == 'H' || t == 'P' || t == 'D' || t == 'T' || t == 'E'; }

  static std::string type_edge_name(const char* prefix, int t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%s%02x", prefix, t);
    return buf;
  }

  // Returns false when parsing stops (end chunk).
  bool chunk(std::uint8_t type, ByteView payload, State& s, Probe& p) const {
    p.hit(valid_);
    ++s.chunks;
    for (int i = 0; i < 4; ++i)
      if (s.chunks == (2u << i)) p.hit(count_[i]);
    const unsigned occ = ++s.occurrences[type];
    if (occ == 2) p.hit(dup2_[type]);
    if (occ == 3 && type == kBugType && s.header) {
      p.hit(bug_);
      p.crash("CHK001");
    }
    ladder(type, s, p);

    switch (type) {
      case 'H': header(payload, s, p); return true;
      case 'P': palette(payload, s, p); return true;
      case 'D': data(payload, s, p); return true;
      case 'T': text(payload, p); return true;
      case 'E':
        p.hit(end_);
        if (!s.data) p.hit(end_before_data_);
        return false;
      default:
        p.hit((type & 0x20) ? unknown_ancillary_ : unknown_critical_);
        return true;
    }
  }

  // Type chain: starts at the first chunk of type 0, each link raises the
  // type by 1..4 modulo 256, and a rung opens when a chunk repeats the newest
  // link's type. Chunks of any other type leave the chain alone.
  void ladder(unsigned type, State& s, Probe& p) const {
    if (s.chain == 0) {
      if (type == 0) s.chain = 1;
      return;
    }
    const unsigned step = (type - s.last_type) & 0xFF;
    if (step == 0) {
      if (!s.last_repeated && s.chain <= kRungs) p.hit(rung_[s.chain - 1]);
      s.last_repeated = true;
    } else if (step <= kMaxStride) {
      ++s.chain;
      s.last_type = type;
      s.last_repeated = false;
    }
  }

  void header(ByteView d, State& s, Probe& p) const {
    if (s.header) {
      p.hit(hdr_repeat_);
      return;
    }
    p.hit(s.chunks == 1 ? hdr_first_ : hdr_late_);
    if (d.size() < 4) {
      p.hit(hdr_short_);
      return;
    }
    s.header = true;
    const unsigned width = d[0], height = d[1], depth = d[2], mode = d[3];
    if (width == 0) p.hit(hdr_zero_width_);
    if (height == 0) p.hit(hdr_zero_height_);
    if (width * height > 4096) p.hit(hdr_large_);
    switch (depth) {
      case 1: p.hit(hdr_depth_[0]); break;
      case 2: p.hit(hdr_depth_[1]); break;
      case 4: p.hit(hdr_depth_[2]); break;
      case 8: p.hit(hdr_depth_[3]); break;
      case 16: p.hit(hdr_depth_[4]); break;
      default: p.hit(hdr_bad_depth_); break;
    }
    switch (mode) {
      case 0: p.hit(hdr_mode_[0]); break;
      case 2: p.hit(hdr_mode_[1]); break;
      case 3:
        p.hit(hdr_mode_[2]);
        s.palette_mode = true;
        if (depth == 16) p.hit(hdr_palette_deep_);
        break;
      case 4: p.hit(hdr_mode_[3]); break;
      case 6: p.hit(hdr_mode_[4]); break;
      default: p.hit(hdr_bad_mode_); break;
    }
  }

  void palette(ByteView d, const State& s, Probe& p) const {
    if (!s.header) p.hit(pal_before_hdr_);
    if (d.size() % 3 != 0 || d.empty()) {
      p.hit(pal_bad_len_);
      return;
    }
    const std::size_t entries = d.size() / 3;
    p.hit(entries == 1 ? pal_small_ : entries <= 16 ? pal_medium_ : pal_large_);
    if (s.header && !s.palette_mode) p.hit(pal_unused_);
  }

  void data(ByteView d, State& s, Probe& p) const {
    if (!s.header) p.hit(data_before_hdr_);
    s.data = true;
    if (d.empty()) {
      p.hit(data_empty_);
      return;
    }
    if (d[0] <= 4)
      p.hit(data_filter_[d[0]]);
    else
      p.hit(data_bad_filter_);
    s.data_total += d.size();
    for (int i = 0; i < 4; ++i)
      if (s.data_total >= (std::size_t{8} << (2 * i))) p.hit(data_total_[i]);
  }

  void text(ByteView d, Probe& p) const {
    std::size_t sep = 0;
    while (sep < d.size() && d[sep] != '=') ++sep;
    if (sep == d.size()) {
      p.hit(text_no_sep_);
      return;
    }
    if (sep == 0)
      p.hit(text_empty_key_);
    else if (sep > 4)
      p.hit(text_long_key_);
    else
      p.hit(text_pair_);
  }

  EdgeTable t_;
  EdgeId entry_, magic_bad_, empty_stream_, empty_payload_, junk_, truncated_, bad_check_known_, bad_check_unknown_, valid_;
  std::array<EdgeId, 4> magic_{}, count_{};
  EdgeId unknown_ancillary_, unknown_critical_;
  EdgeId hdr_short_, hdr_first_, hdr_late_, hdr_repeat_, hdr_zero_width_, hdr_zero_height_, hdr_large_;
  std::array<EdgeId, 5> hdr_depth_{}, hdr_mode_{};
  EdgeId hdr_bad_depth_, hdr_bad_mode_, hdr_palette_deep_;
  EdgeId pal_before_hdr_, pal_bad_len_, pal_small_, pal_medium_, pal_large_, pal_unused_;
  EdgeId data_before_hdr_, data_empty_, data_bad_filter_;
  std::array<EdgeId, 5> data_filter_{};
  std::array<EdgeId, 4> data_total_{};
  EdgeId text_no_sep_, text_empty_key_, text_long_key_, text_pair_;
  EdgeId end_, end_before_data_, trailing_, no_header_, no_end_;
  std::array<EdgeId, 256> dup2_{};
  std::array<EdgeId, kRungs> rung_{};
  EdgeId bug_;
};

}  // namespace pairfuzz::targets
