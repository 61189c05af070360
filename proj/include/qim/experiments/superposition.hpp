#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qim/executor.hpp"
#include "qim/optics.hpp"
#include "qim/quantum.hpp"

namespace qim::exp {

struct SuperpositionConfig {
  std::string aperture = "double_gaussian";
  double trap_length = 60.0;  // x0 in wavelengths
  std::size_t grid_points = 32768;
  double grid_step = 1.0 / 32.0;
  double kernel_half_width = 64.0;
  std::size_t detections = 2000;  // detected-photon trials
  std::uint64_t seed = 1;
};

/// Posterior split at the image position a into the two packets.
struct PacketSplit {
  double smaller_probability = 0.0;  // P_s
  double separation = 0.0;           // mean of the right part minus mean of the left part
  double left_width = 0.0;           // standard deviations
  double right_width = 0.0;
  std::size_t dominant_peaks = 0;    // local maxima above 10% of the maximum
};

PacketSplit split_packets(const WaveFunction& psi, double a);

struct SuperpositionTrial {
  double a = 0.0;
  std::size_t emissions = 0;  // including the detected one
  PacketSplit split;
};

struct SuperpositionStats {
  std::size_t trials = 0;      // emissions, detected or not
  std::size_t detections = 0;
  double capture_fraction = 0.0;
  std::vector<SuperpositionTrial> records;
  std::vector<double> smaller_probability;
  double fraction_ps_ge_one_third = 0.0;
  double mean_separation = 0.0;
  double mean_width = 0.0;
};

struct SuperpositionResult {
  WaveFunction final_state;  // posterior of the first trial
  SuperpositionStats stats;
};

/// Repeated preparation from the trap ground state until a photon is detected. An undetected
/// emission resets the state, so it is counted but its collapse is not evaluated.
SuperpositionResult prepare_superposition(const SuperpositionConfig& cfg, const Executor& executor);

/// Posterior after detecting at a, starting from the ground state.
WaveFunction superposition_posterior(const HarmonicTrap& trap, const PhotonEmitter& emitter, const UniformGrid& grid,
                                     double a);

}  // namespace qim::exp
