#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "qim/fft.hpp"
#include "qim/grid.hpp"
#include "qim/optics.hpp"
#include "qim/rng.hpp"

namespace qim {

/// Amplitudes on a uniform z grid (units of the photon wavelength), normalized so that
/// sum |psi|^2 dz = 1.
class WaveFunction {
 public:
  WaveFunction() = default;
  /// Normalizes the given amplitudes; throws null_posterior if they vanish.
  WaveFunction(UniformGrid grid, std::vector<cplx> amplitudes);

  static WaveFunction gaussian(const UniformGrid& grid, double center, double sigma, double momentum = 0.0);

  const UniformGrid& grid() const { return grid_; }
  const std::vector<cplx>& amplitudes() const { return psi_; }
  std::size_t size() const { return psi_.size(); }
  cplx operator[](std::size_t i) const { return psi_[i]; }

  std::vector<double> density() const;
  double norm2() const;

 private:
  UniformGrid grid_;
  std::vector<cplx> psi_;
};

double fidelity(const WaveFunction& a, const WaveFunction& b);

struct HarmonicTrap {
  double length_scale = 1.0;  // x0: ground state psi ~ exp(-z^2 / 2 x0^2)

  void validate() const;
  WaveFunction ground_state(const UniformGrid& grid) const;
  /// Centered grid of n points with n dz^2 = 2 pi x0^2, on which the quarter period is an exact DFT.
  UniformGrid matched_grid(std::size_t n) const;
  bool is_matched(const UniformGrid& grid, double rel_tol = 1e-9) const;
};

/// psi(z) -> A(z - a) psi(z) / N. a must lie on the state lattice shifted by the kernel lattice.
/// Throws null_posterior if the unnormalized norm is below 1e-12.
WaveFunction apply_collapse(const WaveFunction& psi, const CollapseKernel& kernel, double a);
/// Same with an arbitrary multiplicative profile (already evaluated on the state grid).
WaveFunction apply_profile(const WaveFunction& psi, const std::vector<cplx>& profile);

struct Detection {
  UniformGrid a_grid;
  std::vector<double> density;  // normalized: sum density * da = 1
  double total = 0.0;           // int int |A(z - a)|^2 |psi(z)|^2 dz da before normalization
};

/// Density of image positions, P(a) ~ int |A(z - a)|^2 |psi(z)|^2 dz, for every a on the lattice
/// where it can be nonzero.
Detection detection_distribution(const WaveFunction& psi, const CollapseKernel& kernel);

/// Repeated detection distributions for one kernel and one state grid, with the kernel
/// intensity spectrum cached.
class DetectionModel {
 public:
  DetectionModel(const CollapseKernel& kernel, const UniformGrid& state_grid);
  Detection distribution(const WaveFunction& psi) const;
  const CollapseKernel& kernel() const { return kernel_; }

 private:
  CollapseKernel kernel_;
  UniformGrid state_grid_;
  UniformGrid a_grid_;
  fft::Correlator correlator_;
};

enum class Channel { detected, undetected_window, undetected_outside };

struct MeasurementOutcome {
  bool detected = false;
  Channel channel = Channel::detected;
  double a = 0.0;
  WaveFunction posterior;
  /// Detection probability evaluated from the state.
  double detection_probability = 0.0;
};

/// Spontaneous emission imaged through an aperture. Detected photons collapse with A; photons
/// inside the mirrors' azimuthal window but not transmitted collapse with B (chi' = sqrt f (1 - t));
/// photons outside the window collapse with the bare dipole kernel.
class PhotonEmitter {
 public:
  PhotonEmitter(const ApertureProfile& aperture, const UniformGrid& state_grid, double kernel_half_width = 256.0);

  double capture_fraction() const { return eta_; }
  /// Relative weights of the two undetected channels.
  double window_weight() const { return weight_window_; }
  double outside_weight() const { return weight_outside_; }
  const ApertureProfile& aperture() const { return aperture_; }
  const CollapseKernel& kernel(Channel c) const;
  const DetectionModel& model(Channel c) const;

  /// Probability, computed from the state, that the photon is detected.
  double detection_probability(const WaveFunction& psi) const;
  MeasurementOutcome emit(const WaveFunction& psi, Rng& rng) const;
  /// Conditional outcome for a given channel: a drawn from that channel's detection distribution.
  MeasurementOutcome emit_in(const WaveFunction& psi, Channel c, Rng& rng) const;

 private:
  ApertureProfile aperture_;
  double eta_;
  double weight_window_;   // relative weight of the in-window undetected channel
  double weight_outside_;  // relative weight of the out-of-window channel
  std::vector<DetectionModel> models_;  // indexed by Channel
};

MeasurementOutcome emit_photon(const WaveFunction& psi, const ApertureProfile& aperture, Rng& rng);

struct QuarterPeriodResult {
  WaveFunction state;
  double edge_mass = 0.0;  // probability in the outer 2% of the grid after the map
  bool aliasing_warning = false;
};

/// Exact quarter-period harmonic map psi'(x) = e^{-i pi/4} (2 pi x0^2)^{-1/2} int psi(z) e^{-i x z / x0^2} dz,
/// evaluated on the input grid. Unitary to rounding on a matched grid.
QuarterPeriodResult quarter_period(const WaveFunction& psi, const HarmonicTrap& trap, double warn_threshold = 1e-6);

/// Momentum-space amplitudes phi(p) = (2 pi)^{-1/2} int psi(z) e^{-i p z} dz on the given p grid.
std::vector<cplx> momentum_amplitudes(const WaveFunction& psi, const UniformGrid& p_grid);

struct WignerGrid {
  UniformGrid x_grid;
  UniformGrid p_grid;
  std::vector<double> values;  // row-major: values[ix * p_grid.size + ip]
  double at(std::size_t ix, std::size_t ip) const { return values[ix * p_grid.size + ip]; }
};

/// W(X, P) = (1/pi) sum_y psi*(X + y) psi(X - y) e^{2 i P y} dz. X points must lie on the state lattice.
/// The P marginal is exact when the P grid covers one full period pi/dz.
WignerGrid wigner(const WaveFunction& psi, const UniformGrid& x_grid, const UniformGrid& p_grid);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double iqr = 0.0;
  double excess_kurtosis = 0.0;
  bool tail_dominated = false;  // the outer 10% of the grid carries over 5% of the variance
};
Moments moments(const WaveFunction& psi);

void write_state_csv(std::ostream& os, const WaveFunction& psi);
void write_wigner_csv(std::ostream& os, const WignerGrid& w);

/// Binary checkpoint, little-endian: "QIMWF" magic, u32 version, u64 size, f64 start, f64 step,
/// then size pairs of f64 (re, im).
void write_checkpoint(std::ostream& os, const WaveFunction& psi);
WaveFunction read_checkpoint(std::istream& is);
inline constexpr std::uint32_t checkpoint_version = 1;

}  // namespace qim
