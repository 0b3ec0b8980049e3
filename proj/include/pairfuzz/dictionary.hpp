#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pairfuzz/bytes.hpp"

namespace pairfuzz {

class DictionaryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace detail

// Parses AFL dictionary text: one `name="value"` (or bare `"value"`) per
// line, `#` comments, escapes `\xNN`, `\\` and `\"`.
inline std::vector<Bytes> parse_dictionary(std::string_view text) {
  std::vector<Bytes> entries;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = detail::trim(text.substr(start, end - start));
    ++line_no;
    start = end + 1;
    if (line.empty() || line.front() == '#') continue;

    const auto fail = [&](const std::string& what) {
      throw DictionaryError("dictionary line " + std::to_string(line_no) + ": " + what);
    };
    const std::size_t open = line.find('"');
    if (open == std::string_view::npos || line.back() != '"' || line.size() - 1 == open)
      fail("expected a double-quoted value");
    if (open > 0) {
      const std::string_view name = detail::trim(line.substr(0, open));
      if (name.empty() || name.back() != '=') fail("expected name=\"value\"");
    }

    Bytes value;
    const std::string_view body = line.substr(open + 1, line.size() - open - 2);
    for (std::size_t i = 0; i < body.size(); ++i) {
      const char c = body[i];
      if (c != '\\') {
        if (c == '"') fail("unescaped quote");
        value.push_back(static_cast<std::uint8_t>(c));
        continue;
      }
      if (i + 1 >= body.size()) fail("dangling backslash");
      const char e = body[++i];
      if (e == '\\' || e == '"') {
        value.push_back(static_cast<std::uint8_t>(e));
      } else if (e == 'x') {
        const int hi = i + 1 < body.size() ? detail::hex_digit(body[i + 1]) : -1;
        const int lo = i + 2 < body.size() ? detail::hex_digit(body[i + 2]) : -1;
        if (hi < 0 || lo < 0) fail("bad \\x escape");
        value.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
        i += 2;
      } else {
        fail(std::string("unsupported escape \\") + e);
      }
    }
    if (value.empty()) fail("empty entry");
    entries.push_back(std::move(value));
  }
  return entries;
}

inline std::vector<Bytes> load_dictionary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DictionaryError("cannot open dictionary " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_dictionary(ss.str());
}

}  // namespace pairfuzz
