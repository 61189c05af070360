#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qim/rng.hpp"

namespace qim::stats {

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double excess_kurtosis(std::span<const double> x);

/// Linear-interpolated quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::span<const double> x, double p);
double quantile_sorted(std::span<const double> sorted, double p);
double iqr(std::span<const double> x);
double median(std::span<const double> x);

/// One-sample Kolmogorov-Smirnov distance against a continuous CDF.
double ks_distance(std::span<const double> x, const std::function<double(double)>& cdf);
/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::span<const double> a, std::span<const double> b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

struct BootstrapSummary {
  double estimate = 0.0;
  double standard_error = 0.0;
  Interval ci;  // percentile interval
  std::vector<double> replicates;
};

/// Nonparametric bootstrap. `statistic` receives a resampled copy of the data.
BootstrapSummary bootstrap(std::span<const double> data,
                           const std::function<double(std::span<const double>)>& statistic,
                           std::size_t resamples, Rng& rng, double level = 0.95);

/// Percentile interval of replicate values.
Interval percentile_interval(std::vector<double> values, double level);

/// Moments of a density sampled on a uniform grid (weights need not be normalized).
struct GridMoments {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double excess_kurtosis = 0.0;
};
GridMoments grid_moments(std::span<const double> x, std::span<const double> w);

/// Quantile of a density sampled on a uniform grid, linear interpolation of the cumulative sum
/// with each sample treated as a cell centred on its node.
double grid_quantile(std::span<const double> x, std::span<const double> w, double p);

}  // namespace qim::stats
