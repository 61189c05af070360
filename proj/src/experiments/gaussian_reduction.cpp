#include "qim/experiments/gaussian_reduction.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "qim/errors.hpp"
#include "qim/grid.hpp"

namespace qim::exp {

Intensity gaussian_intensity(double sd) {
  require(sd > 0.0, "gaussian kernel: width must be positive");
  return [sd](double u) { return std::exp(-u * u / (2 * sd * sd)); };
}

Intensity cauchy_intensity(double half_width) {
  require(half_width > 0.0, "cauchy kernel: width must be positive");
  return [half_width](double u) { return 1.0 / (1.0 + u * u / (half_width * half_width)); };
}

Intensity sinc_intensity(double width) {
  require(width > 0.0, "sinc kernel: width must be positive");
  return [width](double u) {
    const double v = std::numbers::pi * u / width;
    if (std::abs(v) < 1e-8) return 1.0 - v * v / 3.0;
    const double s = std::sin(v) / v;
    return s * s;
  };
}

Intensity named_intensity(const std::string& kind, double width) {
  if (kind == "gaussian") return gaussian_intensity(width);
  if (kind == "cauchy") return cauchy_intensity(width);
  if (kind == "sinc") return sinc_intensity(width);
  fail(ErrorCategory::invalid_argument, "unknown kernel kind: " + kind);
}

double half_width_half_max(const Intensity& omega2, double scale_hint) {
  const double peak = omega2(0.0);
  require(peak > 0.0, "kernel: zero intensity at the centre");
  double lo = 0.0, hi = scale_hint;
  for (int i = 0; i < 200 && omega2(hi) > peak / 2; ++i) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (omega2(mid) > peak / 2 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ReductionResult gaussian_reduction_analytics(const Intensity& omega2, double sigma, double a, std::size_t grid_points) {
  require(sigma > 0.0, "reduction: sigma must be positive");
  require(grid_points >= 65, "reduction: grid too small");
  ReductionResult r;
  r.kernel_width = half_width_half_max(omega2, sigma);
  require(r.kernel_width >= 5.0 * sigma, "reduction: kernel narrower than 5 sigma, outside the broad-measurement regime",
          ErrorCategory::regime_violation);

  const auto grid = UniformGrid::closed(-14.0 * sigma, 14.0 * sigma, grid_points);
  std::vector<double> rho(grid.size), log_w(grid.size);
  long double z0 = 0, z1 = 0, z2 = 0;
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double x = grid[i];
    rho[i] = std::exp(-x * x / (2 * sigma * sigma));
    const double w = omega2(x - a);
    require(w > 0.0, "reduction: kernel intensity vanishes on the state support", ErrorCategory::numerical);
    log_w[i] = std::log(w);
    const long double q = rho[i] * w;
    z0 += q;
    z1 += q * x;
    z2 += q * x * x;
  }

  auto det3 = [](long double a11, long double a12, long double a13, long double a21, long double a22, long double a23,
                 long double a31, long double a32, long double a33) {
    return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) + a13 * (a21 * a32 - a22 * a31);
  };
  // Least squares of log Omega^2 on {1, x, x^2}, weighted by a Gaussian of centre c and width s. The
  // first pass uses the prior; later passes use the predicted posterior, which removes the leading
  // error from the cubic remainder.
  double c = 0.0, s = sigma;
  for (int pass = 0; pass < 60; ++pass) {
    std::array<long double, 5> m{};
    std::array<long double, 3> rhs{};
    for (std::size_t i = 0; i < grid.size; ++i) {
      const long double t = (grid[i] - c) / s;
      const long double wt = pass == 0 ? rho[i] : std::exp(-0.5L * t * t);
      long double tk = 1;
      for (int k = 0; k < 5; ++k, tk *= t) m[k] += wt * tk;
      rhs[0] += wt * log_w[i];
      rhs[1] += wt * log_w[i] * t;
      rhs[2] += wt * log_w[i] * t * t;
    }
    const long double d = det3(m[0], m[1], m[2], m[1], m[2], m[3], m[2], m[3], m[4]);
    const long double g1 = det3(m[0], rhs[0], m[2], m[1], rhs[1], m[3], m[2], rhs[2], m[4]) / d / s;
    const long double g2 = det3(m[0], m[1], rhs[0], m[1], m[2], rhs[1], m[2], m[3], rhs[2]) / d / (s * s);
    // g1 (x - c) + g2 (x - c)^2 expanded about x = 0.
    r.a_coef = static_cast<double>(g1 - 2 * g2 * c);
    r.b_coef = static_cast<double>(-g2);
    const double denom = 1.0 + 2.0 * r.b_coef * sigma * sigma;
    require(denom > 0.0, "reduction: fitted curvature makes the posterior non-normalizable", ErrorCategory::numerical);
    const double mu = r.a_coef * sigma * sigma / denom;
    const double tau = sigma / std::sqrt(denom);
    const bool settled = pass > 0 && std::abs(mu - r.mu) < 1e-15 * sigma && std::abs(tau - r.tau) < 1e-15 * sigma;
    r.mu = mu;
    r.tau = tau;
    if (settled) break;
    c = mu;
    s = tau;
  }

  const long double mean = z1 / z0;
  r.mu_numeric = static_cast<double>(mean);
  r.tau_numeric = static_cast<double>(std::sqrt(z2 / z0 - mean * mean));
  return r;
}

}  // namespace qim::exp
