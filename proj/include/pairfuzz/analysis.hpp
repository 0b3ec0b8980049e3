#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pairfuzz/campaign.hpp"
#include "pairfuzz/stats/descriptive.hpp"
#include "pairfuzz/stats/linear_model.hpp"
#include "pairfuzz/stats/rank_tests.hpp"

namespace pairfuzz {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kLag1Limit = 0.2;
inline constexpr double kImbalanceLimit = 0.05;
inline constexpr double kHeteroscedasticityAlpha = 0.05;

namespace detail {

inline std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AnalysisError("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Keeps first-appearance order.
inline void add_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

}  // namespace detail

// --- interaction model ------------------------------------------------------

// Every (i, j, k) cell of the K matrices, zeros included.
inline std::vector<stats::PairObservation> pair_observations(const std::vector<PairCountMatrix>& matrices) {
  std::vector<stats::PairObservation> obs;
  obs.reserve(matrices.size() * kM * kM);
  for (std::size_t k = 0; k < matrices.size(); ++k)
    for (std::size_t i = 0; i < kM; ++i)
      for (std::size_t j = 0; j < kM; ++j)
        obs.push_back({static_cast<int>(i + 1), static_cast<int>(j + 1), static_cast<int>(k),
                       static_cast<double>(matrices[k].at_index(i, j))});
  return obs;
}

// Relative spread of observations per (i, j) cell: (max - min) / mean.
inline double cell_imbalance(const std::vector<stats::PairObservation>& obs) {
  std::map<std::pair<int, int>, std::size_t> cells;
  for (const auto& o : obs) ++cells[{o.i, o.j}];
  if (cells.empty()) return 0;
  std::size_t lo = SIZE_MAX, hi = 0, sum = 0;
  for (const auto& [cell, n] : cells) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
    sum += n;
  }
  return static_cast<double>(hi - lo) / (static_cast<double>(sum) / static_cast<double>(cells.size()));
}

// Residual lag-1 autocorrelation with observations ordered by trial, then
// fitted value, then (i, j).
inline double residual_lag1(const std::vector<stats::PairObservation>& obs, const stats::ModelFit& fit) {
  std::vector<std::size_t> order(obs.size());
  for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::tie(obs[x].k, fit.fitted[x], obs[x].i, obs[x].j) < std::tie(obs[y].k, fit.fitted[y], obs[y].i, obs[y].j);
  });
  std::vector<double> series;
  series.reserve(order.size());
  for (std::size_t t : order) series.push_back(fit.residuals[t]);
  return stats::lag1_autocorrelation(series);
}

struct InteractionAnalysis {
  std::string target;
  std::size_t trials = 0;
  std::vector<stats::PairObservation> observations;
  stats::ModelFit additive, full;
  stats::JarqueBera normality;
  stats::BreuschPagan heteroscedasticity;
  double lag1 = 0;
  double imbalance = 0;
  bool anova_run = false;
  std::optional<stats::AnovaResult> anova;
  std::string note;
};

inline InteractionAnalysis analyze_interaction(std::string target, std::vector<stats::PairObservation> obs) {
  InteractionAnalysis a;
  a.target = std::move(target);
  {
    std::vector<int> ks;
    for (const auto& o : obs) ks.push_back(o.k);
    std::sort(ks.begin(), ks.end());
    a.trials = static_cast<std::size_t>(std::unique(ks.begin(), ks.end()) - ks.begin());
  }
  a.observations = std::move(obs);
  a.additive = stats::fit_linear_model(a.observations, false);
  a.full = stats::fit_linear_model(a.observations, true);
  a.normality = stats::jarque_bera(a.full.residuals);
  a.heteroscedasticity = stats::breusch_pagan(a.full.fitted, a.full.residuals);
  a.lag1 = residual_lag1(a.observations, a.full);
  a.imbalance = cell_imbalance(a.observations);

  if (a.full.df_resid == 0) {
    a.note = "not run: no residual degrees of freedom, add trials";
  } else if (std::fabs(a.lag1) > kLag1Limit) {
    a.note = "not run: residual lag-1 autocorrelation " + detail::num(a.lag1);
  } else {
    a.anova_run = true;
    a.anova = a.heteroscedasticity.p < kHeteroscedasticityAlpha ? stats::hc3_interaction_test(a.full)
                                                                : stats::classical_interaction_test(a.additive, a.full);
    if (a.imbalance > kImbalanceLimit) a.note = "unbalanced cells: nested F is approximate";
  }
  return a;
}

inline InteractionAnalysis analyze_interaction(std::string target, const std::vector<PairCountMatrix>& matrices) {
  return analyze_interaction(std::move(target), pair_observations(matrices));
}

inline constexpr std::string_view kGofHeader =
    "target,r2_additive,r2_interaction,r2_delta,r2adj_additive,r2adj_interaction,r2adj_delta";

inline std::string goodness_of_fit_table(const std::vector<InteractionAnalysis>& rows) {
  using detail::num;
  std::ostringstream os;
  os << kGofHeader << '\n';
  for (const auto& a : rows)
    os << a.target << ',' << num(a.additive.r2) << ',' << num(a.full.r2) << ',' << num(a.full.r2 - a.additive.r2) << ','
       << num(a.additive.r2_adj) << ',' << num(a.full.r2_adj) << ',' << num(a.full.r2_adj - a.additive.r2_adj) << '\n';
  return os.str();
}

inline constexpr std::string_view kAnovaHeader =
    "target,trials,variant,statistic,df1,df2,p,stars,bp_p,lag1,jb_stat,jb_p,skewness,excess_kurtosis,imbalance,note";

inline std::string anova_table(const std::vector<InteractionAnalysis>& rows) {
  using detail::num;
  std::ostringstream os;
  os << kAnovaHeader << '\n';
  for (const auto& a : rows) {
    os << a.target << ',' << a.trials << ',';
    if (a.anova) {
      const auto& r = *a.anova;
      os << stats::to_string(r.variant) << ',' << num(r.statistic) << ',' << num(r.df1) << ','
         << (r.variant == stats::AnovaVariant::classical ? num(r.df2) : "") << ',' << num(r.p) << ',' << stats::stars(r.p);
    } else {
      os << "not run,,,,,";
    }
    os << ',' << num(a.heteroscedasticity.p) << ',' << num(a.lag1) << ',' << num(a.normality.statistic) << ','
       << num(a.normality.p) << ',' << num(a.normality.skewness) << ',' << num(a.normality.excess_kurtosis) << ','
       << num(a.imbalance) << ',' << a.note << '\n';
  }
  return os.str();
}

// (fitted, residual) per observation of the interaction fit, for plotting.
inline std::string residual_table(const InteractionAnalysis& a) {
  std::ostringstream os;
  os << "trial,i,j,count,fitted,residual\n";
  for (std::size_t t = 0; t < a.observations.size(); ++t) {
    const auto& o = a.observations[t];
    os << o.k << ',' << o.i << ',' << o.j << ',' << detail::num(o.count) << ',' << detail::num(a.full.fitted[t]) << ','
       << detail::num(a.full.residuals[t]) << '\n';
  }
  return os.str();
}

// --- strategy comparison ----------------------------------------------------

inline std::vector<TrialSummary> read_summary(const std::filesystem::path& path) {
  std::istringstream in(detail::read_text(path));
  std::string line;
  if (!std::getline(in, line) || detail::split_csv(line) != detail::split_csv(std::string(kSummaryHeader)))
    throw AnalysisError(path.string() + ": not a summary file");
  std::vector<TrialSummary> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c = detail::split_csv(line);
    if (c.size() != 9) throw AnalysisError(path.string() + ":" + std::to_string(lineno) + ": expected 9 columns");
    try {
      rows.push_back({c[0], c[1], c[2], std::stoi(c[3]), std::stoull(c[4]), std::stoull(c[5]), std::stoull(c[6]),
                      std::stoull(c[7]), std::stoull(c[8])});
    } catch (const std::exception&) {
      throw AnalysisError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

// Final coverage per (target, variant), in first-appearance order.
struct CoverageSamples {
  std::vector<std::string> targets, variants;
  std::map<std::pair<std::string, std::string>, std::vector<double>> coverage;

  const std::vector<double>* find(const std::string& target, const std::string& variant) const {
    const auto it = coverage.find({target, variant});
    return it == coverage.end() ? nullptr : &it->second;
  }
};

inline CoverageSamples group_summary(const std::vector<TrialSummary>& rows) {
  CoverageSamples s;
  for (const auto& r : rows) {
    detail::add_unique(s.targets, r.target);
    detail::add_unique(s.variants, r.variant);
    s.coverage[{r.target, r.variant}].push_back(static_cast<double>(r.final_coverage));
  }
  return s;
}

struct Comparison {
  std::string target, variant_a, variant_b;
  double median_a = 0, sd_a = 0, median_b = 0, sd_b = 0;
  stats::MannWhitneyResult test;
  double a12 = 0.5;
};

inline Comparison compare(std::string target, std::string a_name, const std::vector<double>& a, std::string b_name,
                          const std::vector<double>& b) {
  Comparison c;
  c.target = std::move(target);
  c.variant_a = std::move(a_name);
  c.variant_b = std::move(b_name);
  c.median_a = stats::median(a);
  c.sd_a = stats::stddev(a);
  c.median_b = stats::median(b);
  c.sd_b = stats::stddev(b);
  c.test = stats::mann_whitney_one_sided(a, b);
  c.a12 = stats::vargha_delaney(a, b);
  return c;
}

// The first variant of each target against every other one, one-sided in
// favour of the first.
inline std::vector<Comparison> comparisons(const CoverageSamples& s) {
  std::vector<Comparison> out;
  for (const auto& t : s.targets) {
    std::vector<std::string> present;
    for (const auto& v : s.variants)
      if (s.find(t, v)) present.push_back(v);
    for (std::size_t b = 1; b < present.size(); ++b)
      out.push_back(compare(t, present[0], *s.find(t, present[0]), present[b], *s.find(t, present[b])));
  }
  return out;
}

inline std::string comparison_table(const std::vector<Comparison>& rows) {
  using detail::num;
  std::ostringstream os;
  os << "target,variant_a,variant_b,median_a,sd_a,median_b,sd_b,u,p,method,stars,a12\n";
  for (const auto& c : rows)
    os << c.target << ',' << c.variant_a << ',' << c.variant_b << ',' << num(c.median_a) << ',' << num(c.sd_a) << ','
       << num(c.median_b) << ',' << num(c.sd_b) << ',' << num(c.test.u) << ',' << num(c.test.p) << ','
       << (c.test.exact ? "exact" : "normal") << ',' << stats::stars(c.test.p) << ',' << num(c.a12) << '\n';
  return os.str();
}

// Median and sd of final coverage per variant, one row per target.
inline std::string variant_table(const CoverageSamples& s) {
  using detail::num;
  std::ostringstream os;
  os << "target";
  for (const auto& v : s.variants) os << ',' << v << "_median," << v << "_sd";
  os << '\n';
  for (const auto& t : s.targets) {
    os << t;
    for (const auto& v : s.variants) {
      const auto* x = s.find(t, v);
      if (x)
        os << ',' << num(stats::median(*x)) << ',' << num(stats::stddev(*x));
      else
        os << ",,";
    }
    os << '\n';
  }
  return os.str();
}

struct ThresholdRow {
  std::string target, variant_a, variant_b;
  std::uint64_t threshold = 0;     // B's final median coverage, rounded up
  std::optional<double> median_exec;  // when A gets there; nullopt = not reached
  std::size_t reached = 0, trials = 0;
};

using CurveSet = std::vector<std::vector<CurvePoint>>;

// For every ordered pair (A, B) of variants on a target: the median exec
// index at which A's trials reach B's final median coverage.
inline std::vector<ThresholdRow> time_to_threshold_rows(const std::string& target, const std::vector<std::string>& variants,
                                                        const std::map<std::string, CurveSet>& curves) {
  std::vector<ThresholdRow> out;
  for (const auto& a : variants)
    for (const auto& b : variants) {
      if (a == b) continue;
      const auto& ca = curves.at(a);
      const auto& cb = curves.at(b);
      std::vector<double> finals;
      for (const auto& c : cb) finals.push_back(c.empty() ? 0.0 : static_cast<double>(c.back().coverage));
      ThresholdRow r;
      r.target = target;
      r.variant_a = a;
      r.variant_b = b;
      r.threshold = static_cast<std::uint64_t>(std::ceil(stats::median(finals)));
      r.median_exec = stats::time_to_threshold(ca, r.threshold);
      r.trials = ca.size();
      for (const auto& c : ca) r.reached += stats::first_reach(c, r.threshold).has_value();
      out.push_back(std::move(r));
    }
  return out;
}

inline std::string threshold_table(const std::vector<ThresholdRow>& rows) {
  std::ostringstream os;
  os << "target,variant_a,variant_b,threshold,median_exec_a,reached,trials\n";
  for (const auto& r : rows)
    os << r.target << ',' << r.variant_a << ',' << r.variant_b << ',' << r.threshold << ','
       << (r.median_exec ? detail::num(*r.median_exec) : "not reached") << ',' << r.reached << ',' << r.trials << '\n';
  return os.str();
}

// --- rendering and directory drivers -----------------------------------------

// Aligned plain-text rendering of a CSV table.
inline std::string render_table(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(detail::split_csv(line));
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  std::ostringstream os;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    for (std::size_t c = 0; c < rows[n].size(); ++c) {
      os << rows[n][c];
      if (c + 1 < rows[n].size()) os << std::string(width[c] - rows[n][c].size() + 2, ' ');
    }
    os << '\n';
    if (n == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      os << std::string(total > 2 ? total - 2 : total, '-') << '\n';
    }
  }
  return os.str();
}

struct AnalysisOutput {
  std::map<std::string, std::string> files;  // name -> contents
  std::string report;                         // plain-text tables
};

// An experiment directory: summary.csv plus <variant>/<target>/trial_<k>/curve.csv.
inline AnalysisOutput analyze_experiment(const std::filesystem::path& dir) {
  const auto rows = read_summary(dir / "summary.csv");
  if (rows.empty()) throw AnalysisError(dir.string() + ": summary has no trials");
  const CoverageSamples s = group_summary(rows);
  AnalysisOutput out;
  const std::string cmp = comparison_table(comparisons(s));
  const std::string var = variant_table(s);

  std::vector<ThresholdRow> ttt;
  for (const auto& t : s.targets) {
    std::vector<std::string> present;
    std::map<std::string, CurveSet> curves;
    for (const auto& r : rows) {
      if (r.target != t) continue;
      detail::add_unique(present, r.variant);
      curves[r.variant].push_back(
          read_curve(dir / r.variant / r.target / ("trial_" + std::to_string(r.trial)) / "curve.csv"));
    }
    const auto part = time_to_threshold_rows(t, present, curves);
    ttt.insert(ttt.end(), part.begin(), part.end());
  }
  const std::string thr = threshold_table(ttt);

  out.files = {{"comparison.csv", cmp}, {"variants.csv", var}, {"time_to_threshold.csv", thr}};
  out.report = "Final coverage by variant\n\n" + render_table(var) + "\nComparisons (one-sided, first variant > other)\n\n" +
               render_table(cmp) + "\nTime to reach the other variant's final median coverage\n\n" + render_table(thr);
  return out;
}

// One or more collect directories: matrices/*.csv plus config.txt naming the
// target.
inline AnalysisOutput analyze_collect(const std::vector<std::filesystem::path>& dirs) {
  std::vector<InteractionAnalysis> results;
  AnalysisOutput out;
  for (const auto& dir : dirs) {
    CampaignConfig cfg;
    apply_config_file(cfg, dir / "config.txt");
    const auto matrices = load_matrix_dir(dir / "matrices");
    if (matrices.empty()) throw AnalysisError(dir.string() + ": no matrices");
    results.push_back(analyze_interaction(cfg.target, matrices));
    out.files["residuals_" + cfg.target + ".csv"] = residual_table(results.back());
  }
  const std::string gof = goodness_of_fit_table(results);
  const std::string anova = anova_table(results);
  out.files["gof.csv"] = gof;
  out.files["anova.csv"] = anova;
  out.report = "Goodness of fit, additive vs interaction model\n\n" + render_table(gof) +
               "\nInteraction test (*** p<0.01, ** p<0.05, * p<0.1)\n\n" + render_table(anova);
  return out;
}

enum class DirectoryKind { experiment, collect };

inline DirectoryKind classify_directory(const std::filesystem::path& dir) {
  if (std::filesystem::exists(dir / "summary.csv")) return DirectoryKind::experiment;
  if (std::filesystem::exists(dir / "collect.csv")) return DirectoryKind::collect;
  throw AnalysisError(dir.string() + ": neither an experiment (summary.csv) nor a collect (collect.csv) directory");
}

}  // namespace pairfuzz
