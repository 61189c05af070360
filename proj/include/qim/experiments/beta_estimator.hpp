#pragma once

#include <cstdint>
#include <span>

#include "qim/stats.hpp"

namespace qim::exp {

struct BetaEstimate {
  double sigma1 = 0.0;  // IQR of the samples
  double sigma2 = 0.0;  // IQR of sums of disjoint pairs, averaged over random pairings
  double beta = 0.0;    // log2(sigma2 / sigma1)
  double standard_error = 0.0;
  stats::Interval ci;
  std::size_t samples = 0;
};

struct BetaOptions {
  std::size_t pairings = 16;
  std::size_t resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 0x5eed;
};

inline constexpr std::size_t beta_min_samples = 200;

/// Point estimate only (no bootstrap).
double beta_point(std::span<const double> samples, std::size_t pairings, Rng& rng);

/// Throws insufficient_samples below 200 samples.
BetaEstimate beta_estimator(std::span<const double> samples, const BetaOptions& options = {});

}  // namespace qim::exp
