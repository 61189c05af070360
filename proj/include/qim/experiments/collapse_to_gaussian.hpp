#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qim/executor.hpp"

namespace qim::exp {

struct CollapseConfig {
  double alpha = 1.0;
  double sigma = 1.0;  // width of each measurement density
  std::size_t steps = 100;
  std::size_t realizations = 32;
  double half_width = 200.0;  // position grid [-half_width, half_width]
  double grid_step = 0.01;
  std::uint64_t seed = 1;
};

struct CollapseTrace {
  double alpha = 0.0;
  /// Ensemble means after n = 1..steps measurements.
  std::vector<double> abs_excess_kurtosis;
  std::vector<double> ks_to_gaussian;  // against the moment-matched Gaussian
  /// KS distance of the one-measurement density from the stable law (flat prior).
  double ks_to_stable_first = 0.0;
  /// Per-realization values after the last measurement.
  std::vector<double> final_excess_kurtosis;
  std::vector<double> final_ks;
};

/// Repeated stable-density measurements on a flat prior. The first result is placed at the origin
/// (the flat prior is translation invariant); later results are drawn from the predictive
/// distribution of the current density.
CollapseTrace collapse_to_gaussian(const CollapseConfig& cfg, const Executor& executor);

struct CumulantConfig {
  double alpha = 1.0;
  std::vector<std::size_t> sizes{10, 30, 100, 300, 1000, 3000};
  std::size_t realizations = 400;
  std::uint64_t seed = 1;
};

struct CumulantScaling {
  double alpha = 0.0;
  std::vector<std::size_t> sizes;
  /// Root-mean-square over realizations of the m-th cumulant, index m - 1.
  std::vector<std::array<double, 4>> rms;
  std::vector<double> mean_c2;
  double expected_c2 = 0.0;  // limit of c2: E[D_2] = -(Fisher information)
  double slope_c3 = 0.0;     // log-log slope of rms c3 against N
  double slope_c4 = 0.0;
};

/// Cumulants of the accumulated log characteristic function. The product of N factors
/// exp(-|s|^alpha + i mu_n s), read as a function of s and rescaled by sqrt(N), has the log transform
/// sum_n log g(k / sqrt(N) - mu_n); its m-th derivative at k = 0 is
/// c_m(N) = N^{-m/2} sum_n D_m(-mu_n), D_m = d^m/dx^m log g, with mu_n drawn from the unit stable law.
CumulantScaling cumulant_scaling(const CumulantConfig& cfg);

}  // namespace qim::exp
