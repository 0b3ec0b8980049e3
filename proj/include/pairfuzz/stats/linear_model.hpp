#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairfuzz/stats/special.hpp"

namespace pairfuzz::stats {

// One count N(i,j) from trial k.
struct PairObservation {
  int i = 0;
  int j = 0;
  int k = 0;
  double count = 0;
};

class DegenerateDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// y = mu + alpha_i + beta_j (+ gamma_ij), reference coding with the smallest
// level of each factor as reference. Coefficient vectors are indexed by level
// position; reference entries are exactly zero.
struct ModelFit {
  bool with_interaction = false;
  std::vector<int> levels_i, levels_j;
  double mu = 0;
  std::vector<double> alpha, beta;
  std::vector<std::vector<double>> gamma;  // empty without interaction
  std::vector<double> fitted, residuals;
  double sse = 0, sst = 0, r2 = 0, r2_adj = 0;
  std::size_t n = 0, parameters = 0, df_resid = 0;

  // design internals kept for the robust covariance
  std::vector<std::array<int, 4>> rows;  // active columns per observation, -1 = none
  Eigen::VectorXd coef;
  Eigen::MatrixXd xtx;

  double cell_fit(std::size_t li, std::size_t lj) const {
    double v = mu + alpha[li] + beta[lj];
    if (with_interaction) v += gamma[li][lj];
    return v;
  }
};

namespace detail {

inline std::vector<int> levels_of(const std::vector<PairObservation>& obs, int PairObservation::*field) {
  std::vector<int> v;
  for (const auto& o : obs) v.push_back(o.*field);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline std::size_t level_index(const std::vector<int>& levels, int x) {
  return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), x) - levels.begin());
}

}  // namespace detail

inline ModelFit fit_linear_model(const std::vector<PairObservation>& obs, bool with_interaction) {
  ModelFit f;
  f.with_interaction = with_interaction;
  f.levels_i = detail::levels_of(obs, &PairObservation::i);
  f.levels_j = detail::levels_of(obs, &PairObservation::j);
  const std::size_t a = f.levels_i.size(), b = f.levels_j.size();
  if (a < 2 || b < 2) throw DegenerateDesign("linear model needs at least 2 levels of each factor");
  const std::size_t base_beta = a, base_gamma = a + b - 1;
  const std::size_t p = base_gamma + (with_interaction ? (a - 1) * (b - 1) : 0);
  f.n = obs.size();
  f.parameters = p;
  if (f.n < p) throw DegenerateDesign("linear model: fewer observations than parameters");

  if (with_interaction) {
    std::vector<char> seen(a * b, 0);
    for (const auto& o : obs)
      seen[detail::level_index(f.levels_i, o.i) * b + detail::level_index(f.levels_j, o.j)] = 1;
    for (std::size_t c = 0; c < seen.size(); ++c)
      if (!seen[c])
        throw DegenerateDesign("interaction model: no observation for cell (" + std::to_string(f.levels_i[c / b]) + "," +
                               std::to_string(f.levels_j[c % b]) + ")");
  }

  f.rows.reserve(f.n);
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(p);
  double mean = 0;
  for (const auto& o : obs) mean += o.count;
  mean /= static_cast<double>(f.n);
  for (const auto& o : obs) {
    const std::size_t li = detail::level_index(f.levels_i, o.i), lj = detail::level_index(f.levels_j, o.j);
    std::array<int, 4> r{0, -1, -1, -1};
    if (li > 0) r[1] = static_cast<int>(li);
    if (lj > 0) r[2] = static_cast<int>(base_beta + lj - 1);
    if (with_interaction && li > 0 && lj > 0) r[3] = static_cast<int>(base_gamma + (li - 1) * (b - 1) + (lj - 1));
    for (int c1 : r) {
      if (c1 < 0) continue;
      xty(c1) += o.count;
      for (int c2 : r)
        if (c2 >= 0) xtx(c1, c2) += 1;
    }
    f.rows.push_back(r);
    f.sst += (o.count - mean) * (o.count - mean);
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
  const auto d = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-9 * std::max(1.0, d.maxCoeff()))
    throw DegenerateDesign("linear model: design matrix is rank deficient");
  f.coef = ldlt.solve(xty);
  f.xtx = std::move(xtx);

  f.mu = f.coef(0);
  f.alpha.assign(a, 0.0);
  f.beta.assign(b, 0.0);
  for (std::size_t li = 1; li < a; ++li) f.alpha[li] = f.coef(li);
  for (std::size_t lj = 1; lj < b; ++lj) f.beta[lj] = f.coef(base_beta + lj - 1);
  if (with_interaction) {
    f.gamma.assign(a, std::vector<double>(b, 0.0));
    for (std::size_t li = 1; li < a; ++li)
      for (std::size_t lj = 1; lj < b; ++lj) f.gamma[li][lj] = f.coef(base_gamma + (li - 1) * (b - 1) + (lj - 1));
  }

  f.fitted.resize(f.n);
  f.residuals.resize(f.n);
  for (std::size_t t = 0; t < f.n; ++t) {
    double y = 0;
    for (int c : f.rows[t])
      if (c >= 0) y += f.coef(c);
    f.fitted[t] = y;
    f.residuals[t] = obs[t].count - y;
    f.sse += f.residuals[t] * f.residuals[t];
  }
  f.df_resid = f.n - p;
  if (f.sst > 0) {
    f.r2 = 1 - f.sse / f.sst;
    f.r2_adj = f.df_resid > 0 ? 1 - (f.sse / static_cast<double>(f.df_resid)) / (f.sst / static_cast<double>(f.n - 1))
                              : f.r2;
    f.r2_adj = std::min(f.r2_adj, f.r2);
  } else {
    // constant response: nothing to explain
    f.r2 = f.r2_adj = 1;
  }
  return f;
}

enum class AnovaVariant { classical, hc3_wald };

inline const char* to_string(AnovaVariant v) { return v == AnovaVariant::classical ? "classical" : "hc3_wald"; }

struct AnovaResult {
  AnovaVariant variant = AnovaVariant::classical;
  double statistic = 0;  // F, or Wald chi-square for hc3
  double df1 = 0, df2 = 0;  // df2 unused for hc3
  double p = 1;
};

// Partial F test of the interaction block from two nested fits.
inline AnovaResult classical_interaction_test(const ModelFit& additive, const ModelFit& full) {
  if (full.df_resid == 0) throw DegenerateDesign("ANOVA: zero residual degrees of freedom, add trials");
  AnovaResult r;
  r.df1 = static_cast<double>(full.parameters - additive.parameters);
  r.df2 = static_cast<double>(full.df_resid);
  const double extra = std::max(0.0, additive.sse - full.sse);
  if (full.sse <= 0) {
    r.statistic = extra > 0 ? std::numeric_limits<double>::infinity() : 0;
    r.p = extra > 0 ? 0 : 1;
    return r;
  }
  r.statistic = (extra / r.df1) / (full.sse / r.df2);
  r.p = f_sf(r.statistic, r.df1, r.df2);
  return r;
}

// Leverages h_ii of the fit's design.
inline std::vector<double> leverages(const ModelFit& f, const Eigen::MatrixXd& xtx_inv) {
  std::vector<double> h(f.n);
  for (std::size_t t = 0; t < f.n; ++t) {
    double v = 0;
    for (int c1 : f.rows[t])
      if (c1 >= 0)
        for (int c2 : f.rows[t])
          if (c2 >= 0) v += xtx_inv(c1, c2);
    h[t] = v;
  }
  return h;
}

// Wald chi-square on the interaction block with HC3 covariance. Cells whose
// residuals are all zero leave directions with no estimated variance; those
// are dropped through a pseudo-inverse and df is the rank that remains.
inline AnovaResult hc3_interaction_test(const ModelFit& full) {
  if (!full.with_interaction) throw std::invalid_argument("hc3_interaction_test needs the interaction fit");
  if (full.df_resid == 0) throw DegenerateDesign("ANOVA: zero residual degrees of freedom, add trials");
  const std::size_t p = full.parameters;
  const std::size_t g0 = full.levels_i.size() + full.levels_j.size() - 1;
  const Eigen::MatrixXd inv = full.xtx.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  const std::vector<double> h = leverages(full, inv);

  Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t t = 0; t < full.n; ++t) {
    const double e = full.residuals[t];
    if (e == 0) continue;
    const double lev = std::min(h[t], 1 - 1e-12);
    const double w = e * e / ((1 - lev) * (1 - lev));
    for (int c1 : full.rows[t])
      if (c1 >= 0)
        for (int c2 : full.rows[t])
          if (c2 >= 0) meat(c1, c2) += w;
  }
  const std::size_t q = p - g0;
  const Eigen::MatrixXd inv_g = inv.middleRows(g0, q);
  const Eigen::MatrixXd v_gg = inv_g * meat * inv_g.transpose();
  const Eigen::VectorXd gamma = full.coef.tail(q);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v_gg);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double tol = std::max(ev.maxCoeff(), 0.0) * 1e-10 * static_cast<double>(q);
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * gamma;
  double w = 0;
  std::size_t rank = 0;
  for (Eigen::Index t = 0; t < ev.size(); ++t)
    if (ev(t) > tol && ev(t) > 0) {
      w += proj(t) * proj(t) / ev(t);
      ++rank;
    }
  AnovaResult r;
  r.variant = AnovaVariant::hc3_wald;
  r.statistic = w;
  r.df1 = static_cast<double>(rank);
  r.p = rank > 0 ? chi2_sf(w, r.df1) : 1.0;
  return r;
}

inline AnovaResult anova_interaction_test(const std::vector<PairObservation>& obs,
                                          AnovaVariant variant = AnovaVariant::classical) {
  const ModelFit additive = fit_linear_model(obs, false);
  const ModelFit full = fit_linear_model(obs, true);
  return variant == AnovaVariant::classical ? classical_interaction_test(additive, full) : hc3_interaction_test(full);
}

}  // namespace pairfuzz::stats
