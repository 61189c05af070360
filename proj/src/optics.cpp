#include "qim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "qim/errors.hpp"

namespace qim {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double deg = pi / 180.0;
constexpr double f_floor = 1e-12;

// Trapezoid weights for a closed grid.
double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

bool in_capture(double xi, double lo, double hi, double step) {
  return xi >= lo - 1e-9 * step && xi <= hi + 1e-9 * step;
}

ApertureProfile from_target(const std::string& name, const std::vector<cplx>& a, const UniformGrid& z,
                            DesignOptions opts) {
  opts.name = name;
  CollapseKernel target{z, a, KernelKind::detected, 0.0};
  return design_aperture(target, opts).aperture;
}

}  // namespace

double ApertureProfile::wavenumber() const { return 2.0 * pi / wavelength; }

std::vector<cplx> ApertureProfile::chi() const {
  std::vector<cplx> out(transmission.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = transmission[i] * std::sqrt(std::max(emission_pattern(xi_grid[i]), 0.0));
  return out;
}

std::vector<cplx> ApertureProfile::chi_complement() const {
  std::vector<cplx> out(transmission.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (1.0 - transmission[i]) * std::sqrt(std::max(emission_pattern(xi_grid[i]), 0.0));
  return out;
}

double ApertureProfile::azimuthal_fraction() const { return mirrors * delta_phi / (2.0 * pi); }

void ApertureProfile::validate() const {
  require(xi_grid.size >= 3, "aperture: xi grid too small");
  require(transmission.size() == xi_grid.size, "aperture: transmission/grid size mismatch");
  require(xi_grid.front() >= -1.0 - 1e-12 && xi_grid.back() <= 1.0 + 1e-12, "aperture: xi grid outside [-1, 1]");
  require(delta_phi > 0.0 && delta_phi <= 2.0 * pi + 1e-12, "aperture: delta_phi must lie in (0, 2 pi]");
  require(mirrors >= 1, "aperture: need at least one mirror");
  require(azimuthal_fraction() <= 1.0 + 1e-12, "aperture: mirrors * delta_phi exceeds 2 pi");
  require(wavelength > 0.0, "aperture: wavelength must be positive");
  require(capture_lo < capture_hi, "aperture: empty capture region");
  for (std::size_t i = 0; i < transmission.size(); ++i) {
    require(std::abs(transmission[i]) <= 1.0 + 1e-9, "aperture: |t| exceeds 1");
    if (!in_capture(xi_grid[i], capture_lo, capture_hi, xi_grid.step))
      require(transmission[i] == cplx{0.0, 0.0}, "aperture: t nonzero outside the capture region");
  }
}

double CollapseKernel::norm2() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return s * z_grid.step;
}

cplx CollapseKernel::at_index(long long j) const {
  if (j < 0 || j >= static_cast<long long>(values.size())) return {0.0, 0.0};
  return values[static_cast<std::size_t>(j)];
}

UniformGrid default_kernel_grid() { return UniformGrid{-256.0, 512.0 / 16384.0, 16384}; }

CollapseKernel kernel_from_spectrum(const std::vector<cplx>& chi, const UniformGrid& xi_grid,
                                    const UniformGrid& z_grid, double wavelength, KernelKind kind) {
  require(chi.size() == xi_grid.size && chi.size() >= 2, "kernel: spectrum/grid size mismatch");
  require(z_grid.size >= 2, "kernel: z grid needs at least two points");
  // xi spans at most [-1, 1], so exp(i k z xi) needs dz <= lambda / 4.
  require(z_grid.step <= 0.25 * wavelength * (1.0 + 1e-9),
          "kernel: z grid coarser than the lambda/4 Nyquist limit");
  const double k = 2.0 * pi / wavelength;
  std::vector<cplx> weighted(chi.size());
  double spectral = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    const double w = trapezoid_weight(i, chi.size()) * xi_grid.step;
    weighted[i] = chi[i] * w;
    spectral += std::norm(chi[i]) * w;
  }
  // exp(i k z_m xi_n) with z_m = (m - co) dz and xi_n = (n - ci) dxi.
  const double in_center = -xi_grid.start / xi_grid.step;
  const double out_center = -z_grid.start / z_grid.step;
  CollapseKernel kernel;
  kernel.z_grid = z_grid;
  kernel.kind = kind;
  kernel.values = fft::chirp_transform(weighted, z_grid.size, k * xi_grid.step * z_grid.step, in_center, out_center);
  // Parseval: int |A|^2 dz = lambda int |chi|^2 dxi.
  kernel.tail_mass = std::max(0.0, wavelength * spectral - kernel.norm2());
  return kernel;
}

CollapseKernel collapse_kernel(const ApertureProfile& aperture, const UniformGrid& z_grid) {
  aperture.validate();
  return kernel_from_spectrum(aperture.chi(), aperture.xi_grid, z_grid, aperture.wavelength, KernelKind::detected);
}

CollapseKernel complement_kernel(const ApertureProfile& aperture, const UniformGrid& z_grid) {
  aperture.validate();
  return kernel_from_spectrum(aperture.chi_complement(), aperture.xi_grid, z_grid, aperture.wavelength,
                              KernelKind::undetected);
}

DesignResult design_aperture(const CollapseKernel& target, const DesignOptions& opts) {
  const auto& z = target.z_grid;
  require(target.values.size() == z.size && z.size >= 2, "design: target kernel/grid size mismatch");
  require(z.step <= 0.25 * opts.wavelength * (1.0 + 1e-9), "design: target grid coarser than lambda/4");
  require(opts.capture_lo >= -1.0 && opts.capture_hi <= 1.0 && opts.capture_lo < opts.capture_hi,
          "design: capture region must be a nonempty subset of [-1, 1]");
  require(opts.xi_points >= 3, "design: xi grid too small");
  const double k = 2.0 * pi / opts.wavelength;
  const auto xi = UniformGrid::closed(-1.0, 1.0, opts.xi_points);

  // chi(xi) = (k / 2 pi) int A(z) exp(-i k z xi) dz
  std::vector<cplx> a(target.values.begin(), target.values.end());
  for (auto& v : a) v *= z.step * k / (2.0 * pi);
  auto spectrum = fft::chirp_transform(a, xi.size, -k * z.step * xi.step, -z.start / z.step, -xi.start / xi.step);

  double total = 0.0, excluded = 0.0;
  for (std::size_t i = 0; i < xi.size; ++i) {
    const double w = trapezoid_weight(i, xi.size) * xi.step * std::norm(spectrum[i]);
    total += w;
    if (!in_capture(xi[i], opts.capture_lo, opts.capture_hi, xi.step)) excluded += w;
  }
  require(total > 0.0, "design: target has no spectral content", ErrorCategory::numerical);
  DesignResult result;
  result.excluded_mass = excluded / total;
  require(result.excluded_mass <= 0.5,
          "design: capture region excludes more than half of the target's spectral mass", ErrorCategory::numerical);

  std::vector<cplx> t(xi.size, cplx{0.0, 0.0});
  double peak = 0.0;
  for (std::size_t i = 0; i < xi.size; ++i) {
    const double f = emission_pattern(xi[i]);
    if (!in_capture(xi[i], opts.capture_lo, opts.capture_hi, xi.step) || f <= f_floor) continue;
    t[i] = spectrum[i] / std::sqrt(f);
    peak = std::max(peak, std::abs(t[i]));
  }
  require(peak > 0.0, "design: no transmission inside the capture region", ErrorCategory::numerical);
  for (auto& v : t) v /= peak;

  auto& ap = result.aperture;
  ap.name = opts.name;
  ap.xi_grid = xi;
  ap.transmission = std::move(t);
  ap.delta_phi = opts.delta_phi;
  ap.mirror_arc = opts.mirror_arc;
  ap.wavelength = opts.wavelength;
  ap.capture_lo = opts.capture_lo;
  ap.capture_hi = opts.capture_hi;
  ap.mirrors = opts.mirrors;
  ap.validate();

  const auto realized = collapse_kernel(ap, z);
  cplx overlap{0.0, 0.0};
  double rn = 0.0, tn = 0.0;
  for (std::size_t i = 0; i < z.size; ++i) {
    overlap += std::conj(target.values[i]) * realized.values[i];
    rn += std::norm(realized.values[i]);
    tn += std::norm(target.values[i]);
  }
  result.scale = overlap / tn;
  double mismatch = 0.0;
  for (std::size_t i = 0; i < z.size; ++i) mismatch += std::norm(realized.values[i] - result.scale * target.values[i]);
  result.distortion = std::sqrt(mismatch / std::max(rn, 1e-300));
  return result;
}

double capture_fraction(const ApertureProfile& aperture, int mirrors) {
  aperture.validate();
  require(mirrors >= 1, "capture_fraction: need at least one mirror");
  const auto chi = aperture.chi();
  double s = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) s += trapezoid_weight(i, chi.size()) * std::norm(chi[i]);
  s *= aperture.xi_grid.step;
  return std::clamp(mirrors * aperture.delta_phi / (2.0 * pi) * s, 0.0, 1.0);
}

double capture_fraction(const ApertureProfile& aperture) { return capture_fraction(aperture, aperture.mirrors); }

std::vector<std::string> preset_names() { return {"double_gaussian", "cauchy", "square", "full", "gaussian_control"}; }

ApertureProfile preset(const std::string& name) {
  const auto z = default_kernel_grid();
  std::vector<cplx> a(z.size);
  DesignOptions opts;
  opts.mirrors = 2;
  if (name == "double_gaussian") {
    // |A|^2 is two Gaussians of standard deviation sigma at +-L/2.
    const double sigma = 1.5, sep = 15.0;
    for (std::size_t i = 0; i < z.size; ++i) {
      const double u = z[i];
      a[i] = std::exp(-(u - sep / 2) * (u - sep / 2) / (4 * sigma * sigma)) +
             std::exp(-(u + sep / 2) * (u + sep / 2) / (4 * sigma * sigma));
    }
    // The quoted 29 degree window is shared by the two mirrors.
    opts.delta_phi = 14.5 * deg;
    opts.mirror_arc = 29.0 * deg;
    opts.capture_lo = -0.25;
    opts.capture_hi = 0.25;
    return from_target(name, a, z, opts);
  }
  if (name == "cauchy") {
    // |A|^2 is a Lorentzian of half width sigma_c.
    const double sigma_c = 3.0;
    for (std::size_t i = 0; i < z.size; ++i) a[i] = 1.0 / std::sqrt(z[i] * z[i] + sigma_c * sigma_c);
    opts.delta_phi = 14.5 * deg;
    opts.mirror_arc = 180.0 * deg;
    return from_target(name, a, z, opts);
  }
  if (name == "square" || name == "gaussian_control") {
    // Each mirror spans 130 degrees in theta and in phi about the equator.
    const double arc = 130.0 * deg;
    const double width = 32.0;
    if (name == "square") {
      for (std::size_t i = 0; i < z.size; ++i) a[i] = std::abs(z[i]) < width / 2 ? 1.0 : 0.0;
    } else {
      // Same position variance as the square profile, W^2 / 12.
      const double s = width / std::sqrt(12.0);
      for (std::size_t i = 0; i < z.size; ++i) a[i] = std::exp(-z[i] * z[i] / (4 * s * s));
    }
    opts.delta_phi = arc / 2.0;
    opts.mirror_arc = arc;
    opts.capture_hi = std::sin(arc / 2.0);
    opts.capture_lo = -opts.capture_hi;
    return from_target(name, a, z, opts);
  }
  if (name == "full") {
    ApertureProfile ap;
    ap.name = name;
    ap.xi_grid = UniformGrid::closed(-1.0, 1.0, default_xi_points);
    ap.transmission.assign(ap.xi_grid.size, cplx{1.0, 0.0});
    ap.delta_phi = 2.0 * pi;
    ap.mirror_arc = 2.0 * pi;
    ap.mirrors = 1;
    return ap;
  }
  fail(ErrorCategory::invalid_argument, "unknown aperture preset: " + name);
}

void write_aperture_csv(std::ostream& os, const ApertureProfile& ap) {
  os.precision(17);
  os << "# name=" << ap.name << "\n";
  os << "# delta_phi_rad=" << ap.delta_phi << "\n";
  os << "# mirror_arc_rad=" << ap.mirror_arc << "\n";
  os << "# wavelength=" << ap.wavelength << "\n";
  os << "# capture_lo=" << ap.capture_lo << "\n";
  os << "# capture_hi=" << ap.capture_hi << "\n";
  os << "# mirrors=" << ap.mirrors << "\n";
  os << "xi,re,im\n";
  for (std::size_t i = 0; i < ap.transmission.size(); ++i)
    os << ap.xi_grid[i] << "," << ap.transmission[i].real() << "," << ap.transmission[i].imag() << "\n";
}

namespace {

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<double> c0, c1, c2;
};

CsvTable read_three_columns(std::istream& is, const std::string& first) {
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        auto key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        t.meta.emplace_back(key, line.substr(eq + 1));
      }
      continue;
    }
    if (!header) {
      require(line == first + ",re,im", "csv: expected header '" + first + ",re,im'", ErrorCategory::config_parse);
      header = true;
      continue;
    }
    std::istringstream row(line);
    double a, b, c;
    char s1, s2;
    require(static_cast<bool>(row >> a >> s1 >> b >> s2 >> c) && s1 == ',' && s2 == ',',
            "csv: malformed row '" + line + "'", ErrorCategory::config_parse);
    t.c0.push_back(a);
    t.c1.push_back(b);
    t.c2.push_back(c);
  }
  require(t.c0.size() >= 2, "csv: need at least two rows", ErrorCategory::config_parse);
  return t;
}

UniformGrid grid_from_samples(const std::vector<double>& x) {
  const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  require(step > 0.0, "csv: abscissae must increase", ErrorCategory::config_parse);
  for (std::size_t i = 1; i < x.size(); ++i)
    require(std::abs(x[i] - x[i - 1] - step) <= 1e-6 * step, "csv: abscissae not uniformly spaced",
            ErrorCategory::config_parse);
  return UniformGrid{x.front(), step, x.size()};
}

}  // namespace

ApertureProfile read_aperture_csv(std::istream& is) {
  auto t = read_three_columns(is, "xi");
  ApertureProfile ap;
  ap.xi_grid = grid_from_samples(t.c0);
  for (std::size_t i = 0; i < t.c0.size(); ++i) ap.transmission.emplace_back(t.c1[i], t.c2[i]);
  for (const auto& [k, v] : t.meta) {
    try {
      if (k == "name") ap.name = v;
      else if (k == "delta_phi_rad") ap.delta_phi = std::stod(v);
      else if (k == "mirror_arc_rad") ap.mirror_arc = std::stod(v);
      else if (k == "wavelength") ap.wavelength = std::stod(v);
      else if (k == "capture_lo") ap.capture_lo = std::stod(v);
      else if (k == "capture_hi") ap.capture_hi = std::stod(v);
      else if (k == "mirrors") ap.mirrors = std::stoi(v);
    } catch (const std::logic_error&) {
      fail(ErrorCategory::config_parse, "aperture csv: bad value for " + k);
    }
  }
  ap.validate();
  return ap;
}

void write_kernel_csv(std::ostream& os, const CollapseKernel& kernel) {
  os.precision(17);
  os << "# kind=" << (kernel.kind == KernelKind::detected ? "detected" : "undetected") << "\n";
  os << "# tail_mass=" << kernel.tail_mass << "\n";
  os << "z,re,im\n";
  for (std::size_t i = 0; i < kernel.values.size(); ++i)
    os << kernel.z_grid[i] << "," << kernel.values[i].real() << "," << kernel.values[i].imag() << "\n";
}

CollapseKernel read_kernel_csv(std::istream& is) {
  auto t = read_three_columns(is, "z");
  CollapseKernel kernel;
  kernel.z_grid = grid_from_samples(t.c0);
  for (std::size_t i = 0; i < t.c0.size(); ++i) kernel.values.emplace_back(t.c1[i], t.c2[i]);
  for (const auto& [k, v] : t.meta) {
    if (k == "kind") kernel.kind = v == "undetected" ? KernelKind::undetected : KernelKind::detected;
    else if (k == "tail_mass") kernel.tail_mass = std::atof(v.c_str());
  }
  return kernel;
}

}  // namespace qim
