#pragma once

// Reference values computed independently of the library: closed forms and direct quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double cauchy_pdf(double x, double s = 1.0) { return s / (pi * (x * x + s * s)); }
inline double cauchy_cdf(double x, double s = 1.0) { return 0.5 + std::atan(x / s) / pi; }

/// Law with characteristic function exp(-sigma^2 s^2): normal with variance 2 sigma^2.
inline double stable2_pdf(double x, double sigma = 1.0) {
  const double v = 2.0 * sigma * sigma;
  return std::exp(-x * x / (2.0 * v)) / std::sqrt(2.0 * pi * v);
}
inline double stable2_cdf(double x, double sigma = 1.0) { return 0.5 * std::erfc(-x / (2.0 * sigma)); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Standard symmetric stable density by direct quadrature of (1/pi) int_0^inf exp(-s^alpha) cos(s x) ds.
inline double stable_pdf(double alpha, double x, double step = 2e-4) {
  const double smax = std::pow(45.0, 1.0 / alpha);
  int n = static_cast<int>(std::ceil(smax / step));
  n += n % 2;
  return simpson([&](double s) { return std::exp(-std::pow(s, alpha)) * std::cos(s * x); }, 0.0, smax, n) / pi;
}

/// Tail constant: P(X > x) ~ C x^{-alpha} for the standard law.
inline double stable_tail_constant(double alpha) { return std::tgamma(alpha) * std::sin(pi * alpha / 2.0) / pi; }

/// CDF of the standard symmetric stable law, tabulated from
/// F(x) = 1/2 + (1/pi) int_0^inf exp(-s^alpha) sin(s x) / s ds on |x| <= xmax and the leading tail term beyond.
class StableCdf {
 public:
  explicit StableCdf(double alpha, double xmax = 60.0, double dx = 0.005) : alpha_(alpha), xmax_(xmax), dx_(dx) {
    const double smax = std::pow(45.0, 1.0 / alpha);
    const double h = 1e-3 * std::min(1.0, 1.0 / alpha);
    int n = static_cast<int>(std::ceil(smax / h));
    n += n % 2;
    const double ds = smax / n;
    const auto m = static_cast<std::size_t>(std::llround(xmax / dx)) + 1;
    values_.assign(m, 0.0);
    // s = 0 node: sin(s x) / s -> x.
    for (std::size_t j = 0; j < m; ++j) values_[j] = ds / 3.0 * dx * static_cast<double>(j);
    // For each node s, sin(s x_j) over x_j = j dx by complex rotation.
    for (int i = 1; i <= n; ++i) {
      const double s = i * ds;
      const double w = (i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * ds / 3.0 * std::exp(-std::pow(s, alpha)) / s;
      const std::complex<double> rot = std::polar(1.0, s * dx);
      std::complex<double> e{1.0, 0.0};
      for (std::size_t j = 0; j < m; ++j) {
        values_[j] += w * e.imag();
        e *= rot;
        if (j % 512 == 511) e = std::polar(1.0, s * dx * static_cast<double>(j + 1));
      }
    }
    for (auto& v : values_) v = 0.5 + v / pi;
  }

  double operator()(double x) const {
    if (x < 0) return 1.0 - (*this)(-x);
    if (x >= xmax_) return 1.0 - stable_tail_constant(alpha_) * std::pow(x, -alpha_);
    const double p = x / dx_;
    const auto j = static_cast<std::size_t>(p);
    const double f = p - static_cast<double>(j);
    return values_[j] * (1.0 - f) + values_[j + 1] * f;
  }

 private:
  double alpha_, xmax_, dx_;
  std::vector<double> values_;
};

/// Kolmogorov-Smirnov distance of a sample from a continuous CDF.
inline double ks(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Type-7 sample quantile.
inline double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double h = (static_cast<double>(x.size()) - 1.0) * p;
  const auto i = static_cast<std::size_t>(h);
  if (i + 1 >= x.size()) return x.back();
  return x[i] + (h - static_cast<double>(i)) * (x[i + 1] - x[i]);
}
inline double iqr(const std::vector<double>& x) { return quantile(x, 0.75) - quantile(x, 0.25); }

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double variance(const std::vector<double>& x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Moments of a density sampled on a uniform grid.
struct GridStats {
  double mass = 0.0, mean = 0.0, var = 0.0, kurt = 0.0;
};
inline GridStats grid_stats(const std::vector<double>& x, const std::vector<double>& w) {
  GridStats g;
  for (std::size_t i = 0; i < x.size(); ++i) {
    g.mass += w[i];
    g.mean += w[i] * x[i];
  }
  g.mean /= g.mass;
  double m4 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - g.mean;
    g.var += w[i] * d * d;
    m4 += w[i] * d * d * d * d;
  }
  g.var /= g.mass;
  m4 /= g.mass;
  g.kurt = m4 / (g.var * g.var) - 3.0;
  return g;
}

}  // namespace oracle
