#include "qim/experiments/collapse_to_gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <span>

#include "qim/errors.hpp"
#include "qim/grid.hpp"
#include "qim/levy.hpp"
#include "qim/rng.hpp"
#include "qim/stats.hpp"

namespace qim::exp {
namespace {

// Densities below this fraction of the peak are dropped from the support.
constexpr double support_floor = 1e-40;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// KS distance between a gridded density (each node a cell of width h) supported on nodes [lo, hi)
// and a continuous CDF.
template <class Cdf>
double grid_ks(const UniformGrid& grid, const std::vector<double>& w, std::size_t lo, std::size_t hi, double total,
               Cdf&& cdf) {
  double acc = 0.0, worst = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double left = cdf(grid[i] - grid.step / 2);
    worst = std::max(worst, std::abs(acc / total - left));
    acc += w[i];
    worst = std::max(worst, std::abs(acc / total - cdf(grid[i] + grid.step / 2)));
  }
  return worst;
}

}  // namespace

CollapseTrace collapse_to_gaussian(const CollapseConfig& cfg, const Executor& executor) {
  StableParams{cfg.alpha, cfg.sigma, 0.0}.validate();
  require(cfg.steps >= 1 && cfg.realizations >= 1, "collapse: need at least one step and one realization");
  require(cfg.half_width > 0.0 && cfg.grid_step > 0.0 && cfg.grid_step < cfg.half_width, "collapse: bad grid");
  const auto grid = UniformGrid::closed(-cfg.half_width, cfg.half_width,
                                        static_cast<std::size_t>(std::llround(2 * cfg.half_width / cfg.grid_step)) + 1);
  const auto x = grid.points();
  const StablePdf pdf(cfg.alpha, 1);
  const double sigma = cfg.sigma;
  const StableParams noise{cfg.alpha, sigma, 0.0};

  std::vector<std::vector<double>> kurt(cfg.realizations, std::vector<double>(cfg.steps));
  std::vector<std::vector<double>> ks(cfg.realizations, std::vector<double>(cfg.steps));
  std::vector<double> ks_first(cfg.realizations);

  executor.parallel_for(cfg.realizations, [&](std::size_t r) {
    Rng rng = Rng::stream(cfg.seed, r);
    std::vector<double> p(x.size(), 1.0);
    std::size_t lo = 0, hi = x.size();  // support [lo, hi)
    for (std::size_t n = 0; n < cfg.steps; ++n) {
      double y = 0.0;
      if (n > 0) {
        const DiscreteSampler sampler(std::vector<double>(p.begin() + lo, p.begin() + hi));
        y = x[lo] + sampler.sample_position(rng) * grid.step + sample_stable(noise, rng);
      }
      double peak = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        p[i] *= pdf.pdf((y - x[i]) / sigma);
        peak = std::max(peak, p[i]);
      }
      require(peak > 0.0, "collapse: density underflow", ErrorCategory::numerical);
      for (std::size_t i = lo; i < hi; ++i) {
        p[i] /= peak;
        if (p[i] < support_floor) p[i] = 0.0;
      }
      while (lo < hi && p[lo] == 0.0) ++lo;
      while (hi > lo && p[hi - 1] == 0.0) --hi;

      const std::span<const double> xs(x.data() + lo, hi - lo), ps(p.data() + lo, hi - lo);
      const auto m = stats::grid_moments(xs, ps);
      kurt[r][n] = m.excess_kurtosis;
      const double sd = std::sqrt(m.variance);
      ks[r][n] = grid_ks(grid, p, lo, hi, m.mass, [&](double v) { return normal_cdf((v - m.mean) / sd); });
      if (n == 0) ks_first[r] = grid_ks(grid, p, lo, hi, m.mass, [&](double v) { return pdf.cdf(v / sigma); });
    }
  });

  CollapseTrace out;
  out.alpha = cfg.alpha;
  const auto count = static_cast<double>(cfg.realizations);
  for (std::size_t n = 0; n < cfg.steps; ++n) {
    double k = 0.0, d = 0.0;
    for (std::size_t r = 0; r < cfg.realizations; ++r) {
      k += std::abs(kurt[r][n]);
      d += ks[r][n];
    }
    out.abs_excess_kurtosis.push_back(k / count);
    out.ks_to_gaussian.push_back(d / count);
  }
  out.ks_to_stable_first = stats::mean(ks_first);
  for (std::size_t r = 0; r < cfg.realizations; ++r) {
    out.final_excess_kurtosis.push_back(kurt[r].back());
    out.final_ks.push_back(ks[r].back());
  }
  return out;
}

CumulantScaling cumulant_scaling(const CumulantConfig& cfg) {
  StableParams{cfg.alpha, 1.0, 0.0}.validate();
  require(cfg.sizes.size() >= 2 && cfg.realizations >= 2, "cumulants: need two sizes and two realizations");
  const StablePdf pdf(cfg.alpha, 4);
  const StableParams unit{cfg.alpha, 1.0, 0.0};
  CumulantScaling out;
  out.alpha = cfg.alpha;
  out.sizes = cfg.sizes;
  out.expected_c2 = -pdf.fisher_information();

  std::vector<double> lx, l3, l4;
  for (std::size_t s = 0; s < cfg.sizes.size(); ++s) {
    const std::size_t n = cfg.sizes[s];
    require(n >= 1, "cumulants: sizes must be positive");
    std::array<double, 4> sq{};
    double c2_sum = 0.0;
    for (std::size_t r = 0; r < cfg.realizations; ++r) {
      Rng rng = Rng::stream(stream_seed(cfg.seed, s), r);
      std::array<double, 4> sum{};
      for (std::size_t i = 0; i < n; ++i) {
        const auto d = pdf.log_derivatives(-sample_stable(unit, rng));
        for (int m = 0; m < 4; ++m) sum[m] += d[m];
      }
      const double nn = static_cast<double>(n);
      for (int m = 0; m < 4; ++m) {
        const double c = sum[m] * std::pow(nn, -(m + 1) / 2.0);
        sq[m] += c * c;
        if (m == 1) c2_sum += c;
      }
    }
    std::array<double, 4> rms{};
    for (int m = 0; m < 4; ++m) rms[m] = std::sqrt(sq[m] / static_cast<double>(cfg.realizations));
    out.rms.push_back(rms);
    out.mean_c2.push_back(c2_sum / static_cast<double>(cfg.realizations));
    lx.push_back(std::log(static_cast<double>(n)));
    l3.push_back(std::log(rms[2]));
    l4.push_back(std::log(rms[3]));
  }
  out.slope_c3 = stats::linear_fit(lx, l3).slope;
  out.slope_c4 = stats::linear_fit(lx, l4).slope;
  return out;
}

}  // namespace qim::exp
