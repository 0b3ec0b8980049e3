#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairfuzz/targets/arith.hpp"
#include "pairfuzz/targets/chunkfmt.hpp"
#include "pairfuzz/targets/strictfmt.hpp"

namespace pairfuzz {

class UnknownTarget : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<TargetPtr>& builtin_targets() {
  static const std::vector<TargetPtr> targets = {std::make_shared<targets::ChunkFmt>(),
                                                 std::make_shared<targets::Arith>(),
                                                 std::make_shared<targets::StrictFmt>()};
  return targets;
}

inline TargetPtr find_target(std::string_view name) {
  for (const auto& t : builtin_targets())
    if (t->name() == name) return t;
  throw UnknownTarget("unknown target '" + std::string(name) + "'");
}

// Reads every regular file of `dir` (sorted by name) as one seed.
inline std::vector<Bytes> load_seed_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::invalid_argument("seed directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<Bytes> seeds;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!data.empty()) seeds.push_back(std::move(data));
  }
  if (seeds.empty()) throw std::invalid_argument("no nonempty seeds in " + dir.string());
  return seeds;
}

inline void write_seed_dir(const Target& target, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto seeds = target.seeds();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    std::ofstream out(dir / ("seed_" + std::to_string(i) + ".bin"), std::ios::binary);
    out.write(reinterpret_cast<const char*>(seeds[i].data()), static_cast<std::streamsize>(seeds[i].size()));
  }
}

}  // namespace pairfuzz
