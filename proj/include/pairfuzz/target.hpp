#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pairfuzz/bytes.hpp"
#include "pairfuzz/coverage.hpp"

namespace pairfuzz {

using EdgeId = std::uint32_t;

struct EdgeInfo {
  std::string name;
  std::string description;
};

struct BugInfo {
  std::string id;
  std::string description;
};

// Static edge numbering for a target. Ids are dense, starting at 0.
class EdgeTable {
 public:
  EdgeId add(std::string name, std::string description) {
    edges_.push_back({std::move(name), std::move(description)});
    return static_cast<EdgeId>(edges_.size() - 1);
  }

  std::size_t size() const { return edges_.size(); }
  const EdgeInfo& operator[](EdgeId id) const { return edges_.at(id); }
  const std::vector<EdgeInfo>& all() const { return edges_; }

  std::optional<EdgeId> find(std::string_view name) const {
    for (std::size_t i = 0; i < edges_.size(); ++i)
      if (edges_[i].name == name) return static_cast<EdgeId>(i);
    return std::nullopt;
  }

 private:
  std::vector<EdgeInfo> edges_;
};

// Collects the edges a single run traverses.
class Probe {
 public:
  explicit Probe(std::size_t edge_count) : hits_(edge_count, 0) {}

  void hit(EdgeId e) {
    if (hits_[e]++ == 0) touched_.push_back(e);
  }

  void crash(std::string_view bug_id) {
    if (!bug_) bug_ = std::string(bug_id);
  }

  const std::vector<EdgeId>& touched() const { return touched_; }
  std::uint32_t hits(EdgeId e) const { return hits_[e]; }
  const std::optional<std::string>& bug() const { return bug_; }

  void reset() {
    for (EdgeId e : touched_) hits_[e] = 0;
    touched_.clear();
    bug_.reset();
  }

 private:
  std::vector<std::uint32_t> hits_;
  std::vector<EdgeId> touched_;
  std::optional<std::string> bug_;
};

// A deterministic instrumented program. `run` must be a pure function of the
// input bytes and must always hit edge 0 (the entry edge).
class Target {
 public:
  virtual ~Target() = default;

  virtual std::string_view name() const = 0;
  virtual const EdgeTable& edges() const = 0;
  virtual void run(ByteView input, Probe& probe) const = 0;
  virtual std::vector<Bytes> seeds() const = 0;
  // Tokens exposed as the auto-dictionary (what a compile-time token
  // extractor would find in the binary).
  virtual std::vector<Bytes> tokens() const = 0;
  virtual std::vector<BugInfo> bugs() const = 0;

  std::size_t edge_count() const { return edges().size(); }
};

using TargetPtr = std::shared_ptr<const Target>;

// Runs inputs against one target, reusing buffers between executions.
class Executor {
 public:
  Executor(const Target& target, bool hitcount_buckets = false, std::size_t map_size = CoverageMap::kDefaultSlots)
      : target_(target), probe_(target.edge_count()), buckets_(hitcount_buckets) {
    const std::size_t needed = target.edge_count() * (buckets_ ? kBucketsPerEdge : 1);
    if (needed > map_size) throw std::invalid_argument("target edges do not fit the coverage map");
  }

  const ExecResult& run(ByteView input) {
    probe_.reset();
    target_.run(input, probe_);
    result_.coverage.clear();
    for (EdgeId e : probe_.touched())
      result_.coverage.push_back(buckets_ ? e * kBucketsPerEdge + hit_bucket(probe_.hits(e)) : e);
    std::sort(result_.coverage.begin(), result_.coverage.end());
    result_.crashed = probe_.bug().has_value();
    result_.bug_id = probe_.bug();
    result_.exec_index = executions_++;
    return result_;
  }

  std::uint64_t executions() const { return executions_; }

 private:
  const Target& target_;
  Probe probe_;
  bool buckets_;
  ExecResult result_;
  std::uint64_t executions_ = 0;
};

inline ExecResult execute(const Target& target, ByteView input) {
  Executor exec(target);
  return exec.run(input);
}

}  // namespace pairfuzz
