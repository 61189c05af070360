#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qim/executor.hpp"
#include "qim/experiments/beta_estimator.hpp"

namespace qim::exp {

enum class PostSelect { none, first_emission };
enum class LossUnraveling { recoil_kick, image_position };

PostSelect parse_post_select(const std::string& s);
LossUnraveling parse_loss_unraveling(const std::string& s);
std::string to_string(PostSelect p);
std::string to_string(LossUnraveling u);

struct DiffusionConfig {
  std::string aperture = "square";
  double trap_length = 16.0;  // x0 in wavelengths
  std::size_t grid_points = 32768;  // matched grid: N dz^2 = 2 pi x0^2
  double kernel_half_width = 256.0;
  std::size_t trajectories = 24;
  std::size_t detections = 200;
  double efficiency = 0.5;  // probability that an emission is detected
  PostSelect post_select = PostSelect::none;
  LossUnraveling loss_unraveling = LossUnraveling::recoil_kick;
  std::uint64_t seed = 1;
  BetaOptions beta{};
};

struct DiffusionRecord {
  std::uint64_t seed = 0;  // trajectory stream index
  std::vector<double> delta_x;         // change of <X> across each detection's collapse
  std::vector<std::size_t> losses;     // undetected emissions before each detection
  std::vector<bool> post_selected;     // detection kept by the post-selection policy
  std::vector<double> mean_x;          // <X> after each detection, laboratory frame
  double max_edge_mass = 0.0;          // largest wrapped-mass diagnostic of the quarter periods
  bool aborted = false;
  std::string abort_reason;
};

struct VarianceGrowthPoint {
  std::size_t samples = 0;
  double variance = 0.0;
};

struct DiffusionResult {
  std::vector<DiffusionRecord> records;
  std::size_t aborted = 0;
  std::size_t samples = 0;  // Delta<X> values entering the estimator
  double mean_losses = 0.0;
  double capture_fraction = 0.0;  // of the aperture, for reference
  BetaEstimate beta;
  std::vector<VarianceGrowthPoint> variance_growth;  // sample variance over the first n samples
};

/// Repeated imaging with quarter-period evolution in between. Each cycle repeats emissions until
/// one is detected (probability `efficiency` each), collapses with A, records Delta<X>, and applies
/// a quarter period of the trap. Losses are unravelled either as recoil kicks drawn from the
/// undetected emission pattern (tracked as a phase-space offset) or as B collapses at sampled images.
DiffusionResult anomalous_diffusion(const DiffusionConfig& cfg, const Executor& executor);

}  // namespace qim::exp
