// Hand-worked time-to-threshold cases, shared by the unit tests and the
// acceptance run.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pairfuzz/analysis.hpp"

namespace fixtures {

using pairfuzz::CurvePoint;
using pairfuzz::CurveSet;

inline std::vector<CurvePoint> curve(std::initializer_list<std::pair<std::uint64_t, std::uint64_t>> pts) {
  std::vector<CurvePoint> c;
  for (auto [e, cov] : pts) c.push_back({e, cov});
  return c;
}

struct Expected {
  std::string a, b;
  std::uint64_t threshold;
  std::optional<double> median_exec;
  std::size_t reached;
};

struct ThresholdFixture {
  std::string name;
  std::map<std::string, CurveSet> curves;
  std::vector<Expected> expected;
};

inline const std::vector<ThresholdFixture>& threshold_fixtures() {
  static const std::vector<ThresholdFixture> f = {
      // B's finals 8, 9, 11: threshold 9. A reaches 9 at 50, 20 and never:
      // median of {20, 50, inf} = 50. A's finals 12, 10, 7 give 10, which B
      // reaches only in its third trial: median inf.
      {"odd trials, one miss",
       {{"A", {curve({{0, 0}, {10, 5}, {50, 9}, {100, 12}}), curve({{0, 0}, {20, 9}, {100, 10}}),
               curve({{0, 0}, {30, 4}, {100, 7}})}},
        {"B", {curve({{0, 0}, {40, 8}, {100, 8}}), curve({{0, 0}, {60, 9}, {100, 9}}),
               curve({{0, 0}, {5, 10}, {70, 11}, {100, 11}})}}},
       {{"A", "B", 9, 50.0, 2}, {"B", "A", 10, std::nullopt, 1}}},
      // B's finals 10, 11, 12, 14 have median 11.5, rounded up to 12. A reaches
      // 12 at 30, 70, never, 90: median (70 + 90) / 2. A's median final is 14;
      // only B's last trial gets there.
      {"even trials, fractional median",
       {{"A", {curve({{0, 0}, {30, 12}, {200, 13}}), curve({{0, 0}, {70, 15}, {200, 15}}),
               curve({{0, 0}, {50, 11}, {200, 11}}), curve({{0, 0}, {60, 10}, {90, 12}, {200, 20}})}},
        {"B", {curve({{0, 0}, {200, 10}}), curve({{0, 0}, {200, 11}}), curve({{0, 0}, {200, 12}}),
               curve({{0, 0}, {200, 14}})}}},
       {{"A", "B", 12, 80.0, 3}, {"B", "A", 14, std::nullopt, 1}}},
      // Two trials, one miss: the median of {15, inf} is inf. Reaching the
      // threshold exactly counts. B reaches A's median final 6 (of 6 and 5,
      // 5.5 rounded up) at 40 in both trials.
      {"half reached",
       {{"A", {curve({{0, 0}, {15, 6}, {40, 6}}), curve({{0, 0}, {40, 5}})}},
        {"B", {curve({{0, 0}, {40, 6}}), curve({{0, 0}, {40, 6}})}}},
       {{"A", "B", 6, std::nullopt, 1}, {"B", "A", 6, 40.0, 2}}},
  };
  return f;
}

// Empty string when every expected row matches.
inline std::string check_fixture(const ThresholdFixture& f) {
  const auto rows = pairfuzz::time_to_threshold_rows("toy", {"A", "B"}, f.curves);
  for (const auto& e : f.expected) {
    const pairfuzz::ThresholdRow* r = nullptr;
    for (const auto& x : rows)
      if (x.variant_a == e.a && x.variant_b == e.b) r = &x;
    if (!r) return f.name + ": missing row " + e.a + "/" + e.b;
    if (r->threshold != e.threshold) return f.name + ": threshold " + std::to_string(r->threshold);
    if (r->median_exec != e.median_exec) return f.name + ": median exec differs for " + e.a + "/" + e.b;
    if (r->reached != e.reached) return f.name + ": reached " + std::to_string(r->reached);
  }
  return {};
}

}  // namespace fixtures
