#pragma once

// Sample statistics for the Monte Carlo checks: moments with jackknife and
// median-of-means errors, OLS with robust errors, two-sample
// Kolmogorov-Smirnov, and Hill tail estimation.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "lidc/numerics.hpp"

namespace lidc::stats {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("mean: empty sample");
  return pairwise_sum(x) / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
  if (x.size() < 2) throw InvalidArgument("variance: need at least two samples");
  const double m = mean(x);
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - m) * (x[i] - m);
  return pairwise_sum(d) / static_cast<double>(x.size() - 1);
}

inline double covariance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("covariance: need paired samples, n >= 2");
  const double mx = mean(x), my = mean(y);
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - mx) * (y[i] - my);
  return pairwise_sum(d) / static_cast<double>(x.size() - 1);
}

inline double correlation(std::span<const double> x, std::span<const double> y) {
  return covariance(x, y) / std::sqrt(variance(x) * variance(y));
}

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Mean with its standard error; for the mean the delete-one jackknife equals s/sqrt(n).
inline Estimate mean_estimate(std::span<const double> x) {
  return {mean(x), x.size() > 1 ? std::sqrt(variance(x) / static_cast<double>(x.size())) : 0.0};
}

/// Delete-one jackknife of a pairwise statistic, covariance here, in O(n).
inline Estimate covariance_jackknife(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 3) throw InvalidArgument("covariance_jackknife: need paired samples, n >= 3");
  const double sx = pairwise_sum(x), sy = pairwise_sum(y);
  std::vector<double> xy(n);
  for (std::size_t i = 0; i < n; ++i) xy[i] = x[i] * y[i];
  const double sxy = pairwise_sum(xy);
  const double full = covariance(x, y);
  const double m = static_cast<double>(n - 1);
  std::vector<double> loo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = sx - x[i], ay = sy - y[i], axy = sxy - xy[i];
    loo[i] = (axy - ax * ay / m) / (m - 1.0);
  }
  const double lm = mean(loo);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = (loo[i] - lm) * (loo[i] - lm);
  return {full, std::sqrt(m / static_cast<double>(n) * pairwise_sum(d))};
}

/// Median of block means over `blocks` contiguous blocks; stderr from the
/// block-mean spread, scaled by the median's asymptotic efficiency.
inline Estimate median_of_means(std::span<const double> x, std::size_t blocks = 32) {
  if (x.empty()) throw InvalidArgument("median_of_means: empty sample");
  blocks = std::clamp<std::size_t>(blocks, 1, x.size());
  const std::size_t per = x.size() / blocks;
  std::vector<double> means(blocks);
  for (std::size_t b = 0; b < blocks; ++b) means[b] = mean(x.subspan(b * per, per));
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  const double med = blocks % 2 ? sorted[blocks / 2] : 0.5 * (sorted[blocks / 2 - 1] + sorted[blocks / 2]);
  const double se = blocks > 1 ? std::sqrt(M_PI / 2.0 * variance(means) / static_cast<double>(blocks)) : 0.0;
  return {med, se};
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;         // classical
  double slope_stderr_robust = 0.0;  // heteroscedasticity-consistent (HC0)
  double r2 = 0.0;
};

inline LinearFit ols(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw InvalidArgument("ols: need paired samples, n >= 2");
  const double mx = mean(x), my = mean(y);
  std::vector<double> dxx(n), dxy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dxx[i] = (x[i] - mx) * (x[i] - mx);
    dxy[i] = (x[i] - mx) * (y[i] - my);
  }
  const double sxx = pairwise_sum(dxx);
  if (!(sxx > 0.0)) throw InvalidArgument("ols: x has no spread");
  LinearFit f;
  f.slope = pairwise_sum(dxy) / sxx;
  f.intercept = my - f.slope * mx;
  std::vector<double> rr(n), hc(n), tt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - f.intercept - f.slope * x[i];
    rr[i] = e * e;
    hc[i] = dxx[i] * e * e;
    tt[i] = (y[i] - my) * (y[i] - my);
  }
  const double rss = pairwise_sum(rr);
  const double tss = pairwise_sum(tt);
  f.slope_stderr = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
  f.slope_stderr_robust = std::sqrt(pairwise_sum(hc)) / sxx;
  f.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  return f;
}

/// P(K > lambda) for the limiting Kolmogorov distribution.
inline double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form, fast for small lambda.
    const double y = M_PI * M_PI / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 20; ++k) s += std::exp(-static_cast<double>((2 * k - 1) * (2 * k - 1)) * y);
    return std::clamp(1.0 - std::sqrt(2.0 * M_PI) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double t = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k % 2 ? 1.0 : -1.0) * t;
    if (t < 1e-300) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival(d * en)};
}

/// Hill estimate of the tail index from the top k order statistics.
inline double hill(std::span<const double> sorted_desc, std::size_t k) {
  if (k < 2 || k >= sorted_desc.size()) throw InvalidArgument("hill: need 2 <= k < n");
  const double base = std::log(sorted_desc[k]);
  std::vector<double> l(k);
  for (std::size_t i = 0; i < k; ++i) l[i] = std::log(sorted_desc[i]) - base;
  return static_cast<double>(k) / pairwise_sum(l);
}

}  // namespace lidc::stats
