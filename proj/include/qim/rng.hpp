#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qim {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the independent stream `index` derived from a master seed.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

/// Thin wrapper over mt19937_64. The variate transforms are written out here rather than
/// taken from <random> so that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t master, std::uint64_t index) { return Rng(stream_seed(master, index)); }

  std::uint64_t bits() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double rate);
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

/// Inverse-CDF sampling from non-negative weights on a grid; returns a fractional index.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(const std::vector<double>& weights);

  double total() const { return total_; }
  /// Bin index drawn with probability weight/total.
  std::size_t sample_index(Rng& rng) const;
  /// Continuous position: bin index plus uniform offset in [-1/2, 1/2).
  double sample_position(Rng& rng) const;

 private:
  std::vector<double> cdf_;
  double total_ = 0.0;
};

}  // namespace qim
