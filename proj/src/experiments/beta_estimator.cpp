#include "qim/experiments/beta_estimator.hpp"

#include <cmath>
#include <numeric>

#include "qim/errors.hpp"

namespace qim::exp {
namespace {

struct Widths {
  double sigma1;
  double sigma2;
};

Widths widths(std::span<const double> x, std::size_t pairings, Rng& rng) {
  const double s1 = stats::iqr(x);
  std::vector<std::size_t> order(x.size());
  std::vector<double> sums(x.size() / 2);
  double s2 = 0.0;
  for (std::size_t k = 0; k < pairings; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] = x[order[2 * i]] + x[order[2 * i + 1]];
    s2 += stats::iqr(sums);
  }
  return {s1, s2 / static_cast<double>(pairings)};
}

}  // namespace

double beta_point(std::span<const double> samples, std::size_t pairings, Rng& rng) {
  require(samples.size() >= 4, "beta: too few samples", ErrorCategory::insufficient_samples);
  require(pairings >= 1, "beta: need at least one pairing");
  const auto w = widths(samples, pairings, rng);
  require(w.sigma1 > 0.0, "beta: samples have zero interquartile range", ErrorCategory::numerical);
  return std::log2(w.sigma2 / w.sigma1);
}

BetaEstimate beta_estimator(std::span<const double> samples, const BetaOptions& options) {
  require(samples.size() >= beta_min_samples, "beta: at least 200 samples are required",
          ErrorCategory::insufficient_samples);
  Rng rng(options.seed);
  BetaEstimate out;
  out.samples = samples.size();
  const auto w = widths(samples, options.pairings, rng);
  require(w.sigma1 > 0.0, "beta: samples have zero interquartile range", ErrorCategory::numerical);
  out.sigma1 = w.sigma1;
  out.sigma2 = w.sigma2;
  out.beta = std::log2(w.sigma2 / w.sigma1);
  const auto boot = stats::bootstrap(
      samples, [&](std::span<const double> r) { return beta_point(r, options.pairings, rng); }, options.resamples, rng,
      options.level);
  out.standard_error = boot.standard_error;
  out.ci = boot.ci;
  return out;
}

}  // namespace qim::exp
