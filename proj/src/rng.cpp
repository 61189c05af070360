#include "qim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qim/errors.hpp"

namespace qim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() {
  // 53 random bits, shifted by half an ulp so that neither 0 nor 1 occurs.
  const std::uint64_t r = engine_() >> 11;
  return (static_cast<double>(r) + 0.5) * 0x1.0p-53;
}

double Rng::exponential(double rate) {
  require(rate > 0.0, "exponential: rate must be positive");
  return -std::log(uniform()) / rate;
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::index(std::size_t n) {
  require(n > 0, "Rng::index: empty range");
  // Rejection to remove modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::size_t>(r % n);
}

DiscreteSampler::DiscreteSampler(const std::vector<double>& weights) : cdf_(weights.size()) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += std::max(weights[i], 0.0);
    cdf_[i] = acc;
  }
  total_ = acc;
  require(total_ > 0.0, "DiscreteSampler: weights sum to zero", ErrorCategory::numerical);
}

std::size_t DiscreteSampler::sample_index(Rng& rng) const {
  const double u = rng.uniform() * total_;
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<std::size_t>(it - cdf_.begin());
}

double DiscreteSampler::sample_position(Rng& rng) const {
  const auto i = sample_index(rng);
  return static_cast<double>(i) + rng.uniform() - 0.5;
}

}  // namespace qim
