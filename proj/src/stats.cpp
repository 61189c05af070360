#include "qim/stats.hpp"

#include <algorithm>
#include <cmath>

#include "qim/errors.hpp"

namespace qim::stats {

double mean(std::span<const double> x) {
  require(!x.empty(), "mean: empty sample", ErrorCategory::insufficient_samples);
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  require(x.size() > 1, "variance: need at least two samples", ErrorCategory::insufficient_samples);
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double excess_kurtosis(std::span<const double> x) {
  require(x.size() > 3, "kurtosis: need at least four samples", ErrorCategory::insufficient_samples);
  const double m = mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - m) * (v - m);
    m2 += d;
    m4 += d * d;
  }
  const double n = static_cast<double>(x.size());
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2) - 3.0;
}

double quantile_sorted(std::span<const double> sorted, double p) {
  require(!sorted.empty(), "quantile: empty sample", ErrorCategory::insufficient_samples);
  require(p >= 0.0 && p <= 1.0, "quantile: p outside [0,1]");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> x, double p) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, p);
}

double iqr(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

double ks_distance(std::span<const double> x, const std::function<double(double)>& cdf) {
  require(!x.empty(), "ks: empty sample", ErrorCategory::insufficient_samples);
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double ks_distance(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "ks: empty sample", ErrorCategory::insufficient_samples);
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size() && x.size() >= 2, "linear_fit: need two or more paired points",
          ErrorCategory::insufficient_samples);
  const double n = static_cast<double>(x.size());
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, "linear_fit: degenerate abscissae", ErrorCategory::numerical);
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - fit.intercept - fit.slope * x[i];
      rss += r * r;
    }
    fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
  }
  return fit;
}

Interval percentile_interval(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const double tail = 0.5 * (1.0 - level);
  return {quantile_sorted(values, tail), quantile_sorted(values, 1.0 - tail)};
}

BootstrapSummary bootstrap(std::span<const double> data,
                           const std::function<double(std::span<const double>)>& statistic,
                           std::size_t resamples, Rng& rng, double level) {
  require(!data.empty(), "bootstrap: empty sample", ErrorCategory::insufficient_samples);
  require(resamples >= 2, "bootstrap: need at least two resamples");
  BootstrapSummary out;
  out.estimate = statistic(data);
  out.replicates.reserve(resamples);
  std::vector<double> resample(data.size());
  for (std::size_t r = 0; r < resamples; ++r) {
    for (auto& v : resample) v = data[rng.index(data.size())];
    out.replicates.push_back(statistic(resample));
  }
  out.standard_error = std::sqrt(variance(out.replicates));
  out.ci = percentile_interval(out.replicates, level);
  return out;
}

GridMoments grid_moments(std::span<const double> x, std::span<const double> w) {
  require(x.size() == w.size() && !x.empty(), "grid_moments: size mismatch");
  GridMoments m;
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s1 += w[i] * x[i];
  }
  require(s0 > 0.0, "grid_moments: zero mass", ErrorCategory::numerical);
  m.mass = s0;
  m.mean = s1 / s0;
  double c2 = 0.0, c4 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = (x[i] - m.mean) * (x[i] - m.mean);
    c2 += w[i] * d;
    c4 += w[i] * d * d;
  }
  m.variance = c2 / s0;
  m.excess_kurtosis = m.variance > 0.0 ? (c4 / s0) / (m.variance * m.variance) - 3.0 : 0.0;
  return m;
}

double grid_quantile(std::span<const double> x, std::span<const double> w, double p) {
  require(x.size() == w.size() && x.size() >= 2, "grid_quantile: size mismatch");
  double total = 0.0;
  for (double v : w) total += std::max(v, 0.0);
  require(total > 0.0, "grid_quantile: zero mass", ErrorCategory::numerical);
  const double step = x[1] - x[0];
  const double target = p * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wi = std::max(w[i], 0.0);
    if (acc + wi >= target && wi > 0.0) {
      const double frac = (target - acc) / wi;
      return x[i] - 0.5 * step + frac * step;
    }
    acc += wi;
  }
  return x.back() + 0.5 * step;
}

}  // namespace qim::stats
