#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hdinfer {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

// Two-sided tail of a standard normal: 2*(1 - Phi(z)) for z >= 0.
inline double two_sided_pvalue(double z) { return std::erfc(z * M_SQRT1_2); }

inline double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Linear-interpolation quantile on a sorted sample (R type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  if (sorted.size() == 1) return sorted[0];
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct QuantileSummary {
  double min = 0, q25 = 0, median = 0, q75 = 0, max = 0;
};

inline QuantileSummary summarize_quantiles(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  QuantileSummary s;
  s.min = values.front();
  s.q25 = quantile_sorted(values, 0.25);
  s.median = quantile_sorted(values, 0.5);
  s.q75 = quantile_sorted(values, 0.75);
  s.max = values.back();
  return s;
}

// One-sample Kolmogorov-Smirnov statistic against Uniform(0,1).
// Input must be sorted.
inline double ks_statistic_uniform(const std::vector<double>& sorted) {
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = sorted[i];
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(cdf - lo, hi - cdf));
  }
  return d;
}

// Asymptotic Kolmogorov tail probability Q(t) = P[sup|B(F)| > t/sqrt(n)].
inline double kolmogorov_tail(double t) {
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return clamp01(2.0 * sum);
}

}  // namespace hdinfer
