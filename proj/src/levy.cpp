#include "qim/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "qim/errors.hpp"
#include "qim/fft.hpp"

namespace qim {
namespace {

constexpr double pi = std::numbers::pi;
// |chi| below exp(-36.84) ~ 1e-16 is dropped.
constexpr double spectral_floor_log = 36.84;
constexpr int max_series_terms = 60;
constexpr int explicit_images = 48;

struct TailSeries {
  std::vector<double> coeff;     // (1/pi) (-1)^{k+1} Gamma(alpha k + 1)/k! sin(k pi alpha / 2)
  std::vector<double> log_size;  // log(Gamma(alpha k + 1)/k!) for truncation
  double alpha = 2.0;

  explicit TailSeries(double a) : alpha(a) {
    if (a >= 2.0) return;
    for (int k = 1; k <= max_series_terms; ++k) {
      const double lg = std::lgamma(a * k + 1.0) - std::lgamma(k + 1.0);
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      coeff.push_back(sign * std::exp(lg) * std::sin(k * pi * a / 2.0) / pi);
      log_size.push_back(lg);
    }
  }

  // m-th derivative of the standard density at y, from the large-|y| series.
  double eval(double y, int m) const {
    if (coeff.empty()) return 0.0;
    const double ay = std::abs(y);
    const double log_y = std::log(ay);
    const double step = std::exp(-alpha * log_y);  // |y|^-alpha
    double power = std::exp(-(1.0 + m) * log_y) * step;  // |y|^{-(alpha k + 1 + m)} at k = 1
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < coeff.size(); ++i, power *= step) {
      const double k = static_cast<double>(i + 1);
      const double size = log_size[i] - alpha * k * log_y;
      if (size > prev) break;  // asymptotic series: stop at the smallest term
      prev = size;
      if (coeff[i] != 0.0) {
        const double p = alpha * k + 1.0;
        double falling = 1.0;
        for (int j = 0; j < m; ++j) falling *= -(p + j);
        sum += coeff[i] * falling * power;
      }
      if (size < -40.0) break;
    }
    // The density is even, so the m-th derivative has parity (-1)^m.
    if (y < 0.0 && (m % 2 == 1)) sum = -sum;
    return sum;
  }

  // Sum over |k| > K of the leading term at y + k P, by the integral approximation.
  double image_remainder(double y, double period, int m) const {
    if (coeff.empty()) return 0.0;
    const double p = alpha + 1.0;
    double lead = coeff[0];
    for (int j = 0; j < m; ++j) lead *= -(p + j);
    const double q = p + m;
    const double start = (explicit_images + 0.5) * period;
    const double right = std::pow(start + y, 1.0 - q) / (period * (q - 1.0));
    const double left = std::pow(start - y, 1.0 - q) / (period * (q - 1.0));
    return lead * (right + ((m % 2 == 1) ? -left : left));
  }
};

double spectral_cutoff(double alpha, int order) {
  double u = std::pow(spectral_floor_log, 1.0 / alpha);
  for (int it = 0; it < 8; ++it)
    u = std::pow(spectral_floor_log + order * std::max(std::log(u), 0.0), 1.0 / alpha);
  return u;
}

std::vector<double> transform(const StableParams& p, const UniformGrid& grid, int order) {
  p.validate();
  require(grid.size >= 2 && grid.step > 0.0, "stable density: grid needs two or more increasing points");
  require(order >= 0 && order <= 8, "stable density: derivative order out of range");
  const double sigma = p.sigma;
  const double reach = std::max(std::abs(grid.front() - p.mu), std::abs(grid.back() - p.mu));
  const double period = std::max(2.0 * reach + 64.0 * sigma, 128.0 * sigma);
  const double ds = 2.0 * pi / period;
  const double s_cut = spectral_cutoff(p.alpha, order) / sigma;
  const auto half = static_cast<std::size_t>(std::ceil(s_cut / ds));
  require(2 * half + 1 <= (std::size_t{1} << 24),
          "stable density: spectral grid too large for this alpha/grid combination", ErrorCategory::resource);

  std::vector<cplx> in(2 * half + 1);
  for (std::size_t n = 0; n < in.size(); ++n) {
    const double s = (static_cast<double>(n) - static_cast<double>(half)) * ds;
    const double chi = std::exp(-std::pow(sigma * std::abs(s), p.alpha));
    cplx factor{1.0, 0.0};
    for (int j = 0; j < order; ++j) factor *= cplx{0.0, -s};
    in[n] = chi * factor;
  }
  const double out_center = -(grid.start - p.mu) / grid.step;
  const auto y = fft::chirp_transform(in, grid.size, -ds * grid.step, static_cast<double>(half), out_center);

  std::vector<double> out(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) out[i] = y[i].real() * ds / (2.0 * pi);

  const TailSeries tail(p.alpha);
  if (tail.coeff.empty()) return out;
  const double ps = period / sigma;
  const double scale = std::pow(sigma, -1.0 - order);
  auto images = [&](double x) {
    const double xs = (x - p.mu) / sigma;
    double acc = 0.0;
    for (int k = 1; k <= explicit_images; ++k) acc += tail.eval(xs + k * ps, order) + tail.eval(xs - k * ps, order);
    return scale * (acc + tail.image_remainder(xs, ps, order));
  };
  // The image sum varies on the scale of the period, so on fine grids it is evaluated on every
  // stride-th node and interpolated with cubic Lagrange polynomials.
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::floor(sigma / grid.step)));
  if (grid.size < 8 * stride || stride < 4) {
    for (std::size_t i = 0; i < grid.size; ++i) out[i] -= images(grid[i]);
    return out;
  }
  const std::size_t nodes = (grid.size - 1) / stride + 2;  // last node may lie past the grid
  std::vector<double> c(nodes);
  for (std::size_t j = 0; j < nodes; ++j) c[j] = images(grid.start + static_cast<double>(j * stride) * grid.step);
  for (std::size_t i = 0; i < grid.size; ++i) {
    const std::size_t j = std::clamp<std::size_t>(i / stride, 1, nodes - 3);
    const double t = static_cast<double>(i) / static_cast<double>(stride) - static_cast<double>(j);
    const double c0 = c[j - 1], c1 = c[j], c2 = c[j + 1], c3 = c[j + 2];
    const double v = -t * (t - 1) * (t - 2) / 6 * c0 + (t + 1) * (t - 1) * (t - 2) / 2 * c1 -
                     (t + 1) * t * (t - 2) / 2 * c2 + (t + 1) * t * (t - 1) / 6 * c3;
    out[i] -= v;
  }
  return out;
}

// Integral of the standard density over [x, inf) for large x > 0, from the tail series.
double tail_integral(double alpha, double x) {
  const TailSeries tail(alpha);
  double sum = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  const double log_x = std::log(x);
  for (std::size_t i = 0; i < tail.coeff.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double size = tail.log_size[i] - alpha * k * log_x;
    if (size > prev) break;
    prev = size;
    sum += tail.coeff[i] * std::exp(-alpha * k * log_x) / (alpha * k);
  }
  return sum;
}

}  // namespace

void StableParams::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 2.0, "stable: alpha must lie in (0, 2]");
  require(std::isfinite(sigma) && sigma > 0.0, "stable: sigma must be positive");
  require(std::isfinite(mu), "stable: mu must be finite");
}

double stable_tail(double alpha, double x, int order) { return TailSeries(alpha).eval(x, order); }

std::vector<double> stable_density(const StableParams& p, const UniformGrid& grid) {
  auto out = transform(p, grid, 0);
  for (auto& v : out) v = std::max(v, 0.0);
  return out;
}

std::vector<double> stable_density(const StableParams& p, std::span<const double> x) {
  require(x.size() >= 2, "stable density: need at least two abscissae");
  const double step = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  require(step > 0.0, "stable density: abscissae must increase");
  for (std::size_t i = 1; i < x.size(); ++i) {
    require(std::abs((x[i] - x[i - 1]) - step) <= 1e-9 * std::max(step, std::abs(x[i])),
            "stable density: grid is not uniform");
  }
  return stable_density(p, UniformGrid{x.front(), step, x.size()});
}

std::vector<double> stable_density_derivative(const StableParams& p, const UniformGrid& grid, int order) {
  return transform(p, grid, order);
}

StablePdf::StablePdf(double alpha, int max_order) : alpha_(alpha), max_order_(max_order) {
  StableParams{alpha, 1.0, 0.0}.validate();
  require(max_order >= 0 && max_order <= 6, "StablePdf: derivative order out of range");
  constexpr std::size_t per_unit = 128;
  const auto n = static_cast<std::size_t>(2.0 * table_half_width * per_unit) + 1;
  grid_ = UniformGrid::closed(-table_half_width, table_half_width, n);
  for (int m = 0; m <= max_order + 1; ++m) table_.push_back(transform({alpha, 1.0, 0.0}, grid_, m));

  const auto& g = table_[0];
  const auto& g1 = table_[1];
  const double h = grid_.step;
  cdf_.resize(n);
  cdf_[0] = alpha < 2.0 ? tail_integral(alpha, table_half_width) : 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    cdf_[i + 1] = cdf_[i] + h * (g[i] + g[i + 1]) / 2.0 + h * h * (g1[i] - g1[i + 1]) / 12.0;

  // Tail series truncated where it is smallest at the table edge; beyond the edge the same terms
  // are at least as accurate.
  const TailSeries series(alpha);
  const double log_edge = std::log(table_half_width);
  std::size_t terms = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < series.coeff.size(); ++i) {
    const double size = series.log_size[i] - alpha * static_cast<double>(i + 1) * log_edge;
    if (size > prev) break;
    prev = size;
    terms = i + 1;
    if (size < -40.0) break;
  }
  for (int m = 0; m <= max_order; ++m) {
    std::vector<double> c(terms);
    for (std::size_t i = 0; i < terms; ++i) {
      const double p = alpha * static_cast<double>(i + 1) + 1.0;
      double falling = 1.0;
      for (int j = 0; j < m; ++j) falling *= -(p + j);
      c[i] = series.coeff[i] * falling;
    }
    tail_.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < terms; ++i) tail_mass_.push_back(series.coeff[i] / (alpha * static_cast<double>(i + 1)));
}

double StablePdf::mass_beyond(double x) const {
  const double u = std::pow(x, -alpha_);
  double sum = 0.0;
  for (std::size_t i = tail_mass_.size(); i-- > 0;) sum = (sum + tail_mass_[i]) * u;
  return sum;
}

double StablePdf::tail(double x, int order) const {
  const auto& c = tail_[order];
  if (c.empty()) return 0.0;
  const double ax = std::abs(x);
  const double u = std::pow(ax, -alpha_);
  double sum = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) sum = (sum + c[i]) * u;
  sum *= std::pow(ax, -1.0 - order);
  return (x < 0.0 && (order % 2 == 1)) ? -sum : sum;
}

double StablePdf::derivative(double x, int order) const {
  require(order >= 0 && order <= max_order_, "StablePdf: derivative order not tabulated");
  if (order == 0 && alpha_ == 1.0) return 1.0 / (pi * (1.0 + x * x));
  if (order == 0 && alpha_ == 2.0) return std::exp(-x * x / 4.0) / (2.0 * std::sqrt(pi));
  if (std::abs(x) >= table_half_width) {
    if (alpha_ >= 2.0) return 0.0;
    return tail(x, order);
  }
  const double pos = grid_.position(x);
  const auto i = std::min(static_cast<std::size_t>(pos), grid_.size - 2);
  const double t = pos - static_cast<double>(i);
  const double h = grid_.step;
  const auto& f = table_[order];
  const auto& d = table_[order + 1];
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * d[i] + (-2 * t3 + 3 * t2) * f[i + 1] +
         (t3 - t2) * h * d[i + 1];
}

double StablePdf::cdf(double x) const {
  if (x <= -table_half_width) return alpha_ < 2.0 ? mass_beyond(-x) : 0.0;
  if (x >= table_half_width) return alpha_ < 2.0 ? 1.0 - mass_beyond(x) : 1.0;
  const double pos = grid_.position(x);
  const auto i = std::min(static_cast<std::size_t>(pos), grid_.size - 2);
  const double t = pos - static_cast<double>(i);
  const double h = grid_.step;
  const auto& g = table_[0];
  const auto& g1 = table_[1];
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double area = h * (g[i] * (t4 / 2 - t3 + t) + h * g1[i] * (t4 / 4 - 2 * t3 / 3 + t2 / 2) +
                           g[i + 1] * (-t4 / 2 + t3) + h * g1[i + 1] * (t4 / 4 - t3 / 3));
  return cdf_[i] + area;
}

std::array<double, 4> StablePdf::log_derivatives(double x) const {
  require(max_order_ >= 4, "StablePdf: log derivatives need max_order >= 4");
  if (alpha_ >= 2.0) return {-x / 2.0, -0.5, 0.0, 0.0};  // log g = -x^2/4 + const
  const double g = derivative(x, 0);
  require(g > 0.0, "StablePdf: density underflow", ErrorCategory::numerical);
  const double r1 = derivative(x, 1) / g, r2 = derivative(x, 2) / g, r3 = derivative(x, 3) / g,
               r4 = derivative(x, 4) / g;
  const double d1 = r1;
  const double d2 = r2 - r1 * r1;
  const double d3 = r3 - 3 * r2 * r1 + 2 * r1 * r1 * r1;
  const double d4 = r4 - 4 * r3 * r1 - 3 * r2 * r2 + 12 * r2 * r1 * r1 - 6 * r1 * r1 * r1 * r1;
  return {d1, d2, d3, d4};
}

double StablePdf::fisher_information() const {
  if (alpha_ >= 2.0) return 0.5;
  const auto& g = table_[0];
  const auto& g1 = table_[1];
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] <= 0.0) continue;
    const double w = (i == 0 || i + 1 == g.size()) ? 0.5 : 1.0;
    sum += w * g1[i] * g1[i] / g[i];
  }
  sum *= grid_.step;
  // Leading-order tails: g ~ c x^{-p}, g'^2/g ~ c p^2 x^{-p-2}.
  const double c = TailSeries(alpha_).coeff[0];
  const double p = alpha_ + 1.0;
  sum += 2.0 * c * p * p * std::pow(table_half_width, -p - 1.0) / (p + 1.0);
  return sum;
}

double sample_stable(const StableParams& p, Rng& rng) {
  p.validate();
  const double v = pi * (rng.uniform() - 0.5);
  double x;
  if (p.alpha == 1.0) {
    x = std::tan(v);
  } else {
    const double w = rng.exponential(1.0);
    const double a = p.alpha;
    x = std::sin(a * v) / std::pow(std::cos(v), 1.0 / a) * std::pow(std::cos((1.0 - a) * v) / w, (1.0 - a) / a);
  }
  return p.mu + p.sigma * x;
}

TimeSeries stable_path(const StableParams& p, const PathConfig& cfg) {
  p.validate();
  require(cfg.steps >= 1, "stable_path: steps must be at least 1");
  require(cfg.horizon > 0.0, "stable_path: horizon must be positive");
  Rng rng(cfg.seed);
  const double dt = cfg.horizon / static_cast<double>(cfg.steps);
  const StableParams inc{p.alpha, p.sigma * std::pow(dt, 1.0 / p.alpha), p.mu * dt};
  TimeSeries s;
  s.seed = cfg.seed;
  s.t.reserve(cfg.steps + 1);
  s.value.reserve(cfg.steps + 1);
  s.t.push_back(0.0);
  s.value.push_back(0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i <= cfg.steps; ++i) {
    acc += sample_stable(inc, rng);
    s.t.push_back(dt * static_cast<double>(i));
    s.value.push_back(acc);
  }
  return s;
}

TimeSeries subordinated_path(const SubordinatedConfig& cfg, Rng& rng) {
  StableParams{cfg.alpha, 1.0, 0.0}.validate();
  require(cfg.jump_rate > 0.0, "subordinated_path: jump_rate must be positive");
  require(cfg.gamma > 0.0, "subordinated_path: gamma must be positive");
  require(cfg.horizon > 0.0, "subordinated_path: horizon must be positive");
  const StableParams unit{cfg.alpha, 1.0, 0.0};
  TimeSeries s;
  s.t.push_back(0.0);
  s.value.push_back(0.0);
  double t = 0.0, acc = 0.0;
  while (true) {
    t += rng.exponential(cfg.jump_rate);
    if (t >= cfg.horizon) break;
    acc += cfg.gamma * sample_stable(unit, rng);
    s.t.push_back(t);
    s.value.push_back(acc);
  }
  s.t.push_back(cfg.horizon);
  s.value.push_back(acc);
  return s;
}

double value_at(const TimeSeries& s, double t) {
  require(!s.t.empty(), "value_at: empty series");
  auto it = std::upper_bound(s.t.begin(), s.t.end(), t);
  if (it == s.t.begin()) return s.value.front();
  return s.value[static_cast<std::size_t>(it - s.t.begin()) - 1];
}

void write_csv(std::ostream& os, const TimeSeries& s, const std::string& value_column) {
  os << "# seed=" << s.seed << "\n";
  os << "t," << value_column << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < s.t.size(); ++i) os << s.t[i] << "," << s.value[i] << "\n";
}

void write_density_csv(std::ostream& os, std::span<const double> x, std::span<const double> density,
                       const StableParams& p) {
  require(x.size() == density.size(), "write_density_csv: size mismatch");
  os << "# alpha=" << p.alpha << " sigma=" << p.sigma << " mu=" << p.mu << "\n";
  os << "x,value\n";
  os.precision(17);
  for (std::size_t i = 0; i < x.size(); ++i) os << x[i] << "," << density[i] << "\n";
}

}  // namespace qim
