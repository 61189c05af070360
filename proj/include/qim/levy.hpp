#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qim/grid.hpp"
#include "qim/rng.hpp"

namespace qim {

/// Symmetric alpha-stable law with characteristic function exp(-sigma^alpha |s|^alpha + i mu s).
struct StableParams {
  double alpha = 2.0;
  double sigma = 1.0;
  double mu = 0.0;

  void validate() const;
};

struct PathConfig {
  double horizon = 1.0;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
};

struct SubordinatedConfig {
  double alpha = 1.0;
  double jump_rate = 1.0;  // Poisson events per unit time
  double gamma = 1.0;      // scale applied to each unit-time stable jump
  double horizon = 1.0;
};

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> value;
  std::uint64_t seed = 0;
};

/// Density on a uniform grid, by a chirp-z transform of the characteristic function.
/// Aliased periodic images are removed with the large-|x| series of the density;
/// residual negative ringing is clamped to zero.
std::vector<double> stable_density(const StableParams& p, const UniformGrid& grid);
/// Same on explicit abscissae, which must be uniformly spaced.
std::vector<double> stable_density(const StableParams& p, std::span<const double> x);

/// m-th x-derivative of the density (m = 0 gives the density itself, unclamped).
std::vector<double> stable_density_derivative(const StableParams& p, const UniformGrid& grid,
                                              int order);

/// Large-|x| series of the m-th derivative of the standard (sigma = 1, mu = 0) density.
/// Terms are summed until they stop decreasing.
double stable_tail(double alpha, double x, int order = 0);

/// Tabulated standard density (sigma = 1, mu = 0) with Hermite interpolation inside
/// |x| <= 64 and the tail series outside. Derivatives up to `max_order` are available.
class StablePdf {
 public:
  explicit StablePdf(double alpha, int max_order = 1);

  double alpha() const { return alpha_; }
  double pdf(double x) const { return derivative(x, 0); }
  double derivative(double x, int order) const;
  double cdf(double x) const;
  /// Derivatives d^m/dx^m log g(x) for m = 1..4 (requires max_order >= 4).
  std::array<double, 4> log_derivatives(double x) const;
  /// Fisher information of the location family, int g'^2 / g dx.
  double fisher_information() const;

  static constexpr double table_half_width = 64.0;

 private:
  double alpha_;
  int max_order_;
  UniformGrid grid_;
  std::vector<std::vector<double>> table_;  // table_[m][i], orders 0..max_order+1
  std::vector<double> cdf_;
  std::vector<std::vector<double>> tail_;  // tail_[m][k-1]: coefficient of |x|^{-alpha k - 1 - m}
  std::vector<double> tail_mass_;          // [k-1]: coefficient of x^{-alpha k} in the mass beyond x

  double tail(double x, int order) const;
  double mass_beyond(double x) const;  // x >= table_half_width
};

/// Chambers-Mallows-Stuck draw.
double sample_stable(const StableParams& p, Rng& rng);

/// L(t_i) on t_i = i * horizon / steps, i = 0..steps, increments of width sigma * dt^{1/alpha}.
TimeSeries stable_path(const StableParams& p, const PathConfig& cfg);

/// Event-time series of S(t) = L(P(t)); the first entry is (0, 0) and the last is (horizon, S(horizon)).
TimeSeries subordinated_path(const SubordinatedConfig& cfg, Rng& rng);

/// Value of a piecewise-constant event series at time t.
double value_at(const TimeSeries& s, double t);

void write_csv(std::ostream& os, const TimeSeries& s, const std::string& value_column);
void write_density_csv(std::ostream& os, std::span<const double> x, std::span<const double> density,
                       const StableParams& p);

}  // namespace qim
