#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qim/errors.hpp"
#include "qim/optics.hpp"

using namespace qim;
using oracle::pi;

namespace {

double peak_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

ApertureProfile uniform_aperture(cplx t) {
  ApertureProfile ap;
  ap.name = "uniform";
  ap.xi_grid = UniformGrid::closed(-1.0, 1.0, default_xi_points);
  ap.transmission.assign(ap.xi_grid.size, t);
  return ap;
}

// Direct trapezoid sum of int chi(xi) exp(i k z xi) dxi.
cplx direct_kernel(const std::vector<cplx>& chi, const UniformGrid& xi, double z) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < xi.size; ++i) {
    const double w = (i == 0 || i + 1 == xi.size) ? 0.5 : 1.0;
    s += w * chi[i] * std::polar(1.0, 2 * pi * z * xi[i]);
  }
  return s * xi.step;
}

std::vector<cplx> gaussian_target(const UniformGrid& z, double center, double sd) {
  std::vector<cplx> a(z.size);
  for (std::size_t i = 0; i < z.size; ++i) a[i] = std::exp(-(z[i] - center) * (z[i] - center) / (4 * sd * sd));
  return a;
}

}  // namespace

TEST_CASE("emission pattern is normalized and non-negative") {
  CHECK(oracle::simpson(emission_pattern, -1.0, 1.0, 1000) == doctest::Approx(1.0).epsilon(1e-12));
  for (double xi = -1.0; xi <= 1.0; xi += 0.01) CHECK(emission_pattern(xi) >= 0.0);
}

TEST_CASE("kernel equals the direct quadrature of the diffraction integral") {
  const auto ap = preset("double_gaussian");
  const auto grid = default_kernel_grid();
  const auto k = collapse_kernel(ap, grid);
  const auto chi = ap.chi();
  const double peak = peak_abs(k.values);
  for (std::size_t i = 0; i < grid.size; i += 1021) CHECK(std::abs(k.values[i] - direct_kernel(chi, ap.xi_grid, grid[i])) < 1e-8 * peak);
}

TEST_CASE("full aperture gives the Bessel kernel") {
  const auto grid = default_kernel_grid();
  const auto k = collapse_kernel(uniform_aperture(1.0), grid);
  const double a0 = std::sqrt(3.0) / 2.0 * pi / 2.0;  // value at z = 0
  for (std::size_t i = 0; i < grid.size; i += 97) {
    const double u = 2 * pi * grid[i];
    const double exact = u == 0.0 ? a0 : std::sqrt(3.0) / 2.0 * pi * std::cyl_bessel_j(1.0, std::abs(u)) / std::abs(u);
    // Trapezoid error from the square-root endpoints of chi.
    CHECK(std::abs(k.values[i] - exact) < 2e-6 * a0);
  }
}

TEST_CASE("narrow slit gives a plane wave") {
  auto ap = uniform_aperture(0.0);
  const double xi0 = 0.3;
  const auto i0 = static_cast<std::size_t>(std::llround(ap.xi_grid.position(xi0)));
  ap.transmission[i0] = 1.0;
  const auto k = collapse_kernel(ap, UniformGrid::closed(-20, 20, 401));
  const double eps = ap.xi_grid.step;
  const double chi0 = std::sqrt(emission_pattern(ap.xi_grid[i0]));
  for (std::size_t i = 0; i < k.z_grid.size; i += 13) {
    const cplx expect = eps * chi0 * std::polar(1.0, 2 * pi * k.z_grid[i] * ap.xi_grid[i0]);
    CHECK(std::abs(k.values[i] - expect) < 1e-12);
  }
}

TEST_CASE("Gaussian spectrum gives a Gaussian kernel") {
  const double sigma = 1.5, kk = 2 * pi;
  const auto xi = UniformGrid::closed(-1.0, 1.0, 4097);
  std::vector<cplx> chi(xi.size);
  for (std::size_t i = 0; i < xi.size; ++i) chi[i] = std::exp(-(kk * sigma * xi[i]) * (kk * sigma * xi[i]));
  const auto k = kernel_from_spectrum(chi, xi, default_kernel_grid(), 1.0, KernelKind::detected);
  const double norm = std::sqrt(pi) / (kk * sigma);
  for (std::size_t i = 0; i < k.z_grid.size; i += 101) {
    const double z = k.z_grid[i];
    CHECK(std::abs(k.values[i] - norm * std::exp(-z * z / (4 * sigma * sigma))) < 1e-10);
  }
}

TEST_CASE("kernel rejects grids coarser than lambda/4") {
  CHECK_THROWS_AS(collapse_kernel(uniform_aperture(1.0), UniformGrid::closed(-10, 10, 21)), Error);
}

TEST_CASE("double-Gaussian design follows the Fourier pair") {
  const auto ap = preset("double_gaussian");
  const double sigma = 1.5, L = 15.0, kk = 2 * pi;
  double peak = 0.0;
  std::vector<double> expect(ap.xi_grid.size, 0.0);
  for (std::size_t i = 0; i < ap.xi_grid.size; ++i) {
    const double x = ap.xi_grid[i];
    if (x < -0.25 || x > 0.25) continue;
    expect[i] = std::exp(-(kk * sigma * x) * (kk * sigma * x)) * std::cos(kk * L * x / 2) / std::sqrt(emission_pattern(x));
    peak = std::max(peak, std::abs(expect[i]));
  }
  for (std::size_t i = 0; i < ap.xi_grid.size; i += 7) {
    CHECK(std::abs(ap.transmission[i] - expect[i] / peak) < 1e-6);
    if (std::abs(ap.xi_grid[i]) > 0.25 + 1e-9) CHECK(ap.transmission[i] == cplx{0.0, 0.0});
  }
}

TEST_CASE("square design is the sampled rectangle's spectrum over sqrt f") {
  const auto ap = preset("square");
  // The target is 1 on the lattice nodes with |z| < 16: j dz for |j| <= 511, dz = 1/32. Its
  // spectrum is the Dirichlet kernel, the sampled form of sin(k W xi / 2) / (k W xi / 2).
  const double dz = 1.0 / 32.0, kk = 2 * pi;
  const auto dirichlet = [&](double x) {
    const double h = kk * x * dz / 2;
    return h == 0 ? 1023.0 : std::sin(1023.0 * h) / std::sin(h);
  };
  double peak = 0.0;
  for (std::size_t i = 0; i < ap.xi_grid.size; ++i)
    if (std::abs(ap.xi_grid[i]) <= ap.capture_hi)
      peak = std::max(peak, std::abs(dirichlet(ap.xi_grid[i])) / std::sqrt(emission_pattern(ap.xi_grid[i])));
  for (std::size_t i = 0; i < ap.xi_grid.size; i += 11) {
    const double x = ap.xi_grid[i];
    if (std::abs(x) > ap.capture_hi) {
      CHECK(ap.transmission[i] == cplx{0.0, 0.0});
      continue;
    }
    CHECK(std::abs(ap.transmission[i] - dirichlet(x) / std::sqrt(emission_pattern(x)) / peak) < 1e-9);
  }
}

TEST_CASE("round trip of a single Gaussian and physicality of designs") {
  const auto z = default_kernel_grid();
  const CollapseKernel target{z, gaussian_target(z, 0.0, 1.5), KernelKind::detected, 0.0};
  DesignOptions opts;
  opts.capture_lo = -0.5;
  opts.capture_hi = 0.5;
  const auto d = design_aperture(target, opts);
  CHECK(d.distortion < 1e-3);
  bool positive = true;
  for (std::size_t i = 0; i < d.aperture.xi_grid.size; ++i) {
    const auto t = d.aperture.transmission[i];
    if (std::abs(t) > 1e-6 && (t.real() < 0 || std::abs(t.imag()) > 1e-9 * std::abs(t))) positive = false;
  }
  CHECK(positive);

  for (const auto& name : preset_names()) {
    const auto ap = preset(name);
    const auto chi = ap.chi();
    for (std::size_t i = 0; i < chi.size(); ++i) CHECK(std::norm(chi[i]) <= emission_pattern(ap.xi_grid[i]) * (1 + 1e-12) + 1e-300);
  }
}

TEST_CASE("design rejects a capture region that misses the spectrum") {
  const auto z = default_kernel_grid();
  const CollapseKernel target{z, gaussian_target(z, 0.0, 0.1), KernelKind::detected, 0.0};
  DesignOptions opts;
  opts.capture_lo = -0.05;
  opts.capture_hi = 0.05;
  CHECK_THROWS_AS(design_aperture(target, opts), Error);
}

TEST_CASE("capture fractions") {
  auto full = uniform_aperture(1.0);
  CHECK(capture_fraction(full, 1) == doctest::Approx(1.0).epsilon(1e-8));
  const double eta = capture_fraction(preset("double_gaussian"));
  CHECK(eta > (1.0 / 186) * 0.7);
  CHECK(eta < (1.0 / 186) * 1.3);
  const double sq = capture_fraction(preset("square"));
  const double loss = (1 - sq) / sq;
  CHECK(loss > 119 * 0.7);
  CHECK(loss < 119 * 1.3);
}

TEST_CASE("complement kernel: perfect and absent detection") {
  const auto grid = UniformGrid::closed(-30, 30, 2401);
  const auto b1 = complement_kernel(uniform_aperture(1.0), grid);
  CHECK(peak_abs(b1.values) == 0.0);
  const auto b0 = complement_kernel(uniform_aperture(0.0), grid);
  const auto bare = collapse_kernel(uniform_aperture(1.0), grid);
  CHECK(b0.kind == KernelKind::undetected);
  for (std::size_t i = 0; i < grid.size; ++i) CHECK(std::abs(b0.values[i] - bare.values[i]) < 1e-14);
}

TEST_CASE("Parseval bookkeeping of kernel tail mass") {
  const auto ap = preset("square");
  const auto k = collapse_kernel(ap, default_kernel_grid());
  const auto chi = ap.chi();
  double spectral = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) spectral += std::norm(chi[i]) * ap.xi_grid.step * ((i == 0 || i + 1 == chi.size()) ? 0.5 : 1.0);
  CHECK(k.norm2() + k.tail_mass == doctest::Approx(spectral).epsilon(1e-9));
}

TEST_CASE("Cauchy preset gives a Lorentzian intensity") {
  const auto k = collapse_kernel(preset("cauchy"), default_kernel_grid());
  const auto i0 = *k.z_grid.index_of(0.0);
  const double p0 = std::norm(k.values[i0]);
  for (double z : {1.0, 3.0, 6.0, 15.0, 40.0}) {
    const auto i = *k.z_grid.index_of(z);
    CHECK(std::norm(k.values[i]) / p0 == doctest::Approx(9.0 / (z * z + 9.0)).epsilon(2e-3));
  }
}

TEST_CASE("translation: A(z - a) is an index shift") {
  const auto k = collapse_kernel(preset("double_gaussian"), default_kernel_grid());
  CHECK(k.at_index(-1) == cplx{0.0, 0.0});
  CHECK(k.at_index(static_cast<long long>(k.values.size())) == cplx{0.0, 0.0});
  CHECK(k.at_index(100) == k.values[100]);
}

TEST_CASE("aperture and kernel CSV round trip") {
  const auto ap = preset("double_gaussian");
  std::stringstream s;
  write_aperture_csv(s, ap);
  const auto back = read_aperture_csv(s);
  CHECK(back.name == ap.name);
  CHECK(back.mirrors == ap.mirrors);
  CHECK(back.delta_phi == ap.delta_phi);
  REQUIRE(back.transmission.size() == ap.transmission.size());
  for (std::size_t i = 0; i < ap.transmission.size(); i += 101) CHECK(back.transmission[i] == ap.transmission[i]);
  CHECK(capture_fraction(back) == doctest::Approx(capture_fraction(ap)).epsilon(1e-12));

  const auto k = collapse_kernel(ap, UniformGrid::closed(-20, 20, 801));
  std::stringstream ks;
  write_kernel_csv(ks, k);
  const auto kb = read_kernel_csv(ks);
  REQUIRE(kb.values.size() == k.values.size());
  CHECK(kb.values[400] == k.values[400]);
}

TEST_CASE("unknown preset and invalid apertures are rejected") {
  CHECK_THROWS_AS(preset("nope"), Error);
  auto ap = uniform_aperture(1.0);
  ap.delta_phi = 0.0;
  CHECK_THROWS_AS(ap.validate(), Error);
  ap = uniform_aperture(1.5);
  CHECK_THROWS_AS(ap.validate(), Error);
}
