#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qim/fft.hpp"
#include "qim/grid.hpp"

namespace qim {

/// Dipole emission pattern over xi = cos(theta), normalized to unit integral on [-1, 1].
inline double emission_pattern(double xi) { return 0.75 * (1.0 - xi * xi); }

/// Default number of samples of the xi grid on [-1, 1].
inline constexpr std::size_t default_xi_points = 32769;

struct ApertureProfile {
  std::string name;
  UniformGrid xi_grid;
  std::vector<cplx> transmission;
  double delta_phi = 2.0 * 3.14159265358979323846;  // azimuthal window per mirror, radians
  double mirror_arc = 0.0;                           // polar coverage per mirror, radians
  double wavelength = 1.0;
  double capture_lo = -1.0;  // capture region in xi
  double capture_hi = 1.0;
  int mirrors = 1;

  double wavenumber() const;
  /// chi(xi) = t(xi) sqrt(f(xi)) on the xi grid.
  std::vector<cplx> chi() const;
  /// chi'(xi) = sqrt(f(xi)) (1 - t(xi)) on the xi grid.
  std::vector<cplx> chi_complement() const;
  /// Fraction of emissions falling in the mirrors' azimuthal windows, mirrors * delta_phi / 2 pi.
  double azimuthal_fraction() const;

  void validate() const;
};

enum class KernelKind { detected, undetected };

struct CollapseKernel {
  UniformGrid z_grid;
  std::vector<cplx> values;
  KernelKind kind = KernelKind::detected;
  /// Integral of |A|^2 outside the grid (Parseval total minus the on-grid sum), per wavelength.
  double tail_mass = 0.0;

  /// Integral of |A|^2 over the grid.
  double norm2() const;
  /// Kernel value at z, zero off the grid. z must lie on the kernel lattice.
  cplx at_index(long long j) const;
};

/// A(z) = int chi(xi) exp(i k z xi) dxi by trapezoid quadrature, evaluated with one chirp-z transform.
CollapseKernel collapse_kernel(const ApertureProfile& aperture, const UniformGrid& z_grid);
/// As collapse_kernel with chi' = sqrt(f) (1 - t).
CollapseKernel complement_kernel(const ApertureProfile& aperture, const UniformGrid& z_grid);
/// Kernel of an arbitrary spectrum chi sampled on xi_grid.
CollapseKernel kernel_from_spectrum(const std::vector<cplx>& chi, const UniformGrid& xi_grid,
                                    const UniformGrid& z_grid, double wavelength, KernelKind kind);

/// Default kernel grid: z in [-256, 256) wavelengths with 2^14 points.
UniformGrid default_kernel_grid();

struct DesignResult {
  ApertureProfile aperture;
  /// Relative L2 mismatch between the target and the realized kernel, after removing the
  /// global complex scale.
  double distortion = 0.0;
  /// Fraction of the target's spectral mass outside the capture region.
  double excluded_mass = 0.0;
  /// Global amplitude factor: realized kernel ~ scale * target.
  cplx scale{1.0, 0.0};
};

struct DesignOptions {
  double delta_phi = 2.0 * 3.14159265358979323846;
  double capture_lo = -1.0;
  double capture_hi = 1.0;
  double mirror_arc = 0.0;
  int mirrors = 1;
  double wavelength = 1.0;
  std::size_t xi_points = default_xi_points;
  std::string name = "designed";
};

/// Inverse design: t(xi) proportional to (1/sqrt f) int A(z) exp(-i k z xi) dz inside the
/// capture region, scaled so that max |t| = 1.
DesignResult design_aperture(const CollapseKernel& target, const DesignOptions& options);

/// eta = mirrors * (delta_phi / 2 pi) * int |chi|^2 dxi.
double capture_fraction(const ApertureProfile& aperture, int mirrors);
double capture_fraction(const ApertureProfile& aperture);

/// Named presets; unknown names are an invalid_argument error.
ApertureProfile preset(const std::string& name);
std::vector<std::string> preset_names();

void write_aperture_csv(std::ostream& os, const ApertureProfile& aperture);
ApertureProfile read_aperture_csv(std::istream& is);
void write_kernel_csv(std::ostream& os, const CollapseKernel& kernel);
CollapseKernel read_kernel_csv(std::istream& is);

}  // namespace qim
