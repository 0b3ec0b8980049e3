#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pairfuzz::stats {

namespace detail {

inline constexpr int kMaxIterations = 1000;
inline constexpr double kEps = 1e-15;
inline constexpr double kTiny = 1e-300;

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2).
inline double beta_fraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta: continued fraction did not converge");
}

}  // namespace detail

// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw std::domain_error("incomplete_beta: a and b must be positive");
  if (std::isnan(x)) return x;
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1) / (a + b + 2)) return front * detail::beta_fraction(a, b, x) / a;
  return 1 - front * detail::beta_fraction(b, a, 1 - x) / b;
}

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (!(a > 0)) throw std::domain_error("gamma_p: a must be positive");
  if (x <= 0) return 0;
  if (std::isinf(x)) return 1;
  const double log_front = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1) {
    // series
    double ap = a, del = 1 / a, sum = del;
    for (int n = 0; n < detail::kMaxIterations; ++n) {
      ap += 1;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * detail::kEps) return sum * std::exp(log_front);
    }
    throw std::runtime_error("gamma_p: series did not converge");
  }
  // continued fraction for Q, modified Lentz
  double b = x + 1 - a, c = 1 / detail::kTiny, d = 1 / b, h = d;
  for (int i = 1; i <= detail::kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < detail::kTiny) d = detail::kTiny;
    c = b + an / c;
    if (std::fabs(c) < detail::kTiny) c = detail::kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < detail::kEps) return 1 - std::exp(log_front) * h;
  }
  throw std::runtime_error("gamma_p: continued fraction did not converge");
}

inline double gamma_q(double a, double x) {
  if (x <= 0) return 1;
  if (x < a + 1) return 1 - gamma_p(a, x);
  // evaluate Q directly to keep precision in the upper tail
  const double log_front = a * std::log(x) - x - std::lgamma(a);
  double b = x + 1 - a, c = 1 / detail::kTiny, d = 1 / b, h = d;
  for (int i = 1; i <= detail::kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < detail::kTiny) d = detail::kTiny;
    c = b + an / c;
    if (std::fabs(c) < detail::kTiny) c = detail::kTiny;
    d = 1 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1) < detail::kEps) return std::exp(log_front) * h;
  }
  throw std::runtime_error("gamma_q: continued fraction did not converge");
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

inline double f_cdf(double f, double d1, double d2) {
  if (f <= 0) return 0;
  if (std::isinf(f)) return 1;
  return incomplete_beta(d1 / 2, d2 / 2, d1 * f / (d1 * f + d2));
}

// Upper tail, computed through the complementary argument so small p-values
// keep their precision.
inline double f_sf(double f, double d1, double d2) {
  if (f <= 0) return 1;
  if (std::isinf(f)) return 0;
  return incomplete_beta(d2 / 2, d1 / 2, d2 / (d2 + d1 * f));
}

inline double chi2_cdf(double x, double k) { return gamma_p(k / 2, x / 2); }
inline double chi2_sf(double x, double k) { return gamma_q(k / 2, x / 2); }

}  // namespace pairfuzz::stats
