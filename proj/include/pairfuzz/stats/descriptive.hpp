#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pairfuzz/stats/special.hpp"

namespace pairfuzz::stats {

inline double mean(const std::vector<double>& x) {
  if (x.empty()) throw std::invalid_argument("mean of empty sample");
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double median(std::vector<double> x) {
  if (x.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(x.begin(), x.end());
  const std::size_t h = x.size() / 2;
  return x.size() % 2 ? x[h] : (x[h - 1] + x[h]) / 2;
}

// Sample standard deviation (n - 1 denominator); 0 for a single value.
inline double stddev(const std::vector<double>& x) {
  if (x.size() < 2) return 0;
  const double m = mean(x);
  double ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

struct Moments {
  double skewness = 0;
  double excess_kurtosis = 0;
};

// Population moment ratios m3/m2^1.5 and m4/m2^2 - 3.
inline Moments moments(const std::vector<double>& x) {
  const double m = mean(x);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 <= 0) return {};
  return {m3 / std::pow(m2, 1.5), m4 / (m2 * m2) - 3};
}

struct JarqueBera {
  double skewness = 0;
  double excess_kurtosis = 0;
  double statistic = 0;
  double p = 1;
};

inline JarqueBera jarque_bera(const std::vector<double>& x) {
  const Moments mo = moments(x);
  JarqueBera jb;
  jb.skewness = mo.skewness;
  jb.excess_kurtosis = mo.excess_kurtosis;
  jb.statistic = static_cast<double>(x.size()) / 6 *
                 (mo.skewness * mo.skewness + mo.excess_kurtosis * mo.excess_kurtosis / 4);
  jb.p = chi2_sf(jb.statistic, 2);
  return jb;
}

// Lag-1 autocorrelation of a series in the given order.
inline double lag1_autocorrelation(const std::vector<double>& x) {
  if (x.size() < 2) return 0;
  const double m = mean(x);
  double num = 0, den = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    den += (x[t] - m) * (x[t] - m);
    if (t + 1 < x.size()) num += (x[t] - m) * (x[t + 1] - m);
  }
  return den > 0 ? num / den : 0;
}

struct BreuschPagan {
  double statistic = 0;  // n * R^2 of e^2 regressed on fitted
  double p = 1;
};

// Koenker's studentized form with the fitted values as the only regressor.
inline BreuschPagan breusch_pagan(const std::vector<double>& fitted, const std::vector<double>& residuals) {
  if (fitted.size() != residuals.size()) throw std::invalid_argument("breusch_pagan: size mismatch");
  const std::size_t n = fitted.size();
  if (n < 3) return {};
  std::vector<double> e2(n);
  for (std::size_t t = 0; t < n; ++t) e2[t] = residuals[t] * residuals[t];
  const double mx = mean(fitted), my = mean(e2);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t t = 0; t < n; ++t) {
    sxx += (fitted[t] - mx) * (fitted[t] - mx);
    sxy += (fitted[t] - mx) * (e2[t] - my);
    syy += (e2[t] - my) * (e2[t] - my);
  }
  if (sxx <= 0 || syy <= 0) return {};
  BreuschPagan bp;
  bp.statistic = static_cast<double>(n) * (sxy * sxy) / (sxx * syy);
  bp.p = chi2_sf(bp.statistic, 1);
  return bp;
}

inline const char* stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

// First exec index at which a monotone curve reaches the threshold. Points
// need exec_index and coverage members.
template <typename Point>
std::optional<std::uint64_t> first_reach(const std::vector<Point>& curve, std::uint64_t threshold) {
  for (const auto& pt : curve)
    if (pt.coverage >= threshold) return pt.exec_index;
  return std::nullopt;
}

// Median over trials with unreached trials ordered last (+infinity). An
// unreached median is returned as nullopt.
template <typename Point>
std::optional<double> time_to_threshold(const std::vector<std::vector<Point>>& curves, std::uint64_t threshold) {
  if (curves.empty()) throw std::invalid_argument("time_to_threshold: no curves");
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> t;
  for (const auto& c : curves) {
    const auto r = first_reach(c, threshold);
    t.push_back(r ? static_cast<double>(*r) : inf);
  }
  const double m = median(t);
  if (std::isinf(m)) return std::nullopt;
  return m;
}

}  // namespace pairfuzz::stats
