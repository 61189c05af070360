#pragma once

#include <cstdint>
#include <vector>

#include "qim/executor.hpp"
#include "qim/quantum.hpp"

namespace qim::exp {

/// |z| measurement: the full-aperture image is superposed with its mirror image, so a detection
/// at a >= 0 collapses with M_a(z) = A(z - a) + A(z + a).
class AbsPositionMeter {
 public:
  /// The state grid must contain z = 0 on its lattice.
  AbsPositionMeter(const UniformGrid& state_grid, double kernel_half_width = 64.0);

  const CollapseKernel& kernel() const { return kernel_; }
  /// Detection density over a >= 0 on the lattice, normalized (sum density * da = 1).
  Detection distribution(const WaveFunction& psi) const;
  WaveFunction collapse(const WaveFunction& psi, double a) const;
  MeasurementOutcome measure(const WaveFunction& psi, Rng& rng) const;

 private:
  UniformGrid state_grid_;
  long long half_ = 0;        // kernel nodes at j dz, j = -half_..half_
  long long state_zero_ = 0;  // state index of z = 0
  CollapseKernel kernel_;
  DetectionModel model_;
};

MeasurementOutcome abs_position_measurement(const WaveFunction& psi, Rng& rng);

struct AbsPositionConfig {
  std::size_t grid_points = 8192;
  double grid_step = 1.0 / 256.0;
  double kernel_half_width = 64.0;
  double packet_center = 8.0;
  double packet_sigma = 1.0;
  bool symmetric = true;  // +-packet_center superposition, otherwise a single packet at +packet_center
  std::size_t measurements = 20;
  std::size_t trajectories = 8;
  std::uint64_t seed = 1;
};

struct AbsPositionTrajectory {
  std::vector<double> results;    // detected a per measurement
  std::vector<double> mean_abs;   // <|z|> after each measurement
  double right_mass = 0.0;        // probability on z > 0 at the end
  double right_kurtosis = 0.0;    // excess kurtosis of the z > 0 packet
  double left_kurtosis = 0.0;     // of the z < 0 packet (0 when it carries no mass)
  double parity_error = 0.0;      // max |rho(z) - rho(-z)| / max rho at the end
  double final_width = 0.0;       // standard deviation of |z|
};

std::vector<AbsPositionTrajectory> abs_position_trajectories(const AbsPositionConfig& cfg, const Executor& executor);

}  // namespace qim::exp
