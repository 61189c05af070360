#pragma once

#include <cstdint>
#include <vector>

#include "qim/executor.hpp"
#include "qim/stats.hpp"

namespace qim::exp {

struct ScalingConfig {
  double alpha = 1.5;
  std::vector<std::size_t> rungs{8, 16, 32, 64};  // measurements per horizon; dt halves per rung
  std::size_t realizations = 4000;
  /// Expected total variance reduction at the finest rung; fixes the horizon T so that every
  /// rung stays in the weak-measurement regime.
  double target_reduction = 1e-3;
  std::size_t grid_points = 512;
  double grid_half_width = 8.0;  // in units of the initial standard deviation
  std::size_t bootstrap_resamples = 1000;
  std::uint64_t seed = 1;
};

struct ScalingResult {
  double alpha = 0.0;
  double horizon = 0.0;
  std::vector<std::size_t> rungs;
  std::vector<double> widths;          // w(dt) = dt^{1/alpha - 1} per rung
  std::vector<double> mean_reduction;  // average of V0 - V_N per rung
  std::vector<double> reduction_se;
  double slope = 0.0;
  double slope_se = 0.0;
  stats::Interval slope_ci;
  double expected_slope = 0.0;  // 2/alpha - 1
  /// Per-realization reductions, [rung][realization].
  std::vector<std::vector<double>> reductions;
};

/// Horizon T such that the finest rung's expected reduction equals the target.
double scaling_horizon(double alpha, std::size_t finest_rung, double target_reduction);

/// Monte Carlo: unit-variance Gaussian prior, N stable-density multiplications per horizon with
/// results drawn from the predictive distribution.
ScalingResult levy_collapse_scaling(const ScalingConfig& cfg, const Executor& executor);

struct DeterministicScaling {
  double alpha = 0.0;
  std::vector<std::size_t> rungs;
  std::vector<double> mean_reduction;
  double slope = 0.0;
  double expected_slope = 0.0;
};

/// Deterministic variant: narrow Gaussian prior, reduction averaged over all results by quadrature,
/// with the state re-approximated as Gaussian after each step.
DeterministicScaling levy_collapse_scaling_deterministic(double alpha, const std::vector<std::size_t>& rungs,
                                                        double target_reduction);

}  // namespace qim::exp
