#include "qim/experiments/levy_scaling.hpp"

#include <algorithm>
#include <cmath>

#include "qim/errors.hpp"
#include "qim/levy.hpp"
#include "qim/rng.hpp"

namespace qim::exp {
namespace {

double width_for(double alpha, double dt) { return std::pow(dt, 1.0 / alpha - 1.0); }

struct GridStats {
  double mean;
  double variance;
};

GridStats weighted(const std::vector<double>& x, const std::vector<double>& p) {
  const auto m = stats::grid_moments(x, p);
  return {m.mean, m.variance};
}

double slope_of(const std::vector<std::size_t>& rungs, const std::vector<double>& values) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < rungs.size(); ++i) {
    require(values[i] > 0.0, "scaling: non-positive average reduction, cannot fit a log-log slope",
            ErrorCategory::numerical);
    lx.push_back(std::log(static_cast<double>(rungs[i])));
    ly.push_back(std::log(values[i]));
  }
  return stats::linear_fit(lx, ly).slope;
}

}  // namespace

double scaling_horizon(double alpha, std::size_t finest_rung, double target_reduction) {
  require(alpha > 1.0 && alpha <= 2.0, "scaling: alpha must lie in (1, 2]");
  require(target_reduction > 0.0 && target_reduction < 1.0, "scaling: target reduction must lie in (0, 1)");
  // Weak measurements on a unit-variance prior reduce the variance by about N I1 / w^2,
  // where I1 is the Fisher information of the unit stable law.
  const double i1 = StablePdf(alpha, 1).fisher_information();
  const double n = static_cast<double>(finest_rung);
  const double w = std::sqrt(i1 * n / target_reduction);
  return n * std::pow(w, 1.0 / (1.0 / alpha - 1.0));
}

ScalingResult levy_collapse_scaling(const ScalingConfig& cfg, const Executor& executor) {
  require(cfg.alpha > 1.0 && cfg.alpha <= 2.0, "scaling: alpha must lie in (1, 2]");
  require(cfg.rungs.size() >= 2, "scaling: need at least two ladder rungs");
  require(std::is_sorted(cfg.rungs.begin(), cfg.rungs.end()) && cfg.rungs.front() >= 1,
          "scaling: rungs must be increasing and positive");
  require(cfg.realizations >= 2, "scaling: need at least two realizations", ErrorCategory::insufficient_samples);
  require(cfg.grid_points >= 16 && cfg.grid_half_width > 0.0, "scaling: bad state grid");

  const StablePdf pdf(cfg.alpha, 1);
  ScalingResult res;
  res.alpha = cfg.alpha;
  res.rungs = cfg.rungs;
  res.expected_slope = 2.0 / cfg.alpha - 1.0;
  res.horizon = scaling_horizon(cfg.alpha, cfg.rungs.back(), cfg.target_reduction);

  const auto grid = UniformGrid::closed(-cfg.grid_half_width, cfg.grid_half_width, cfg.grid_points);
  const auto x = grid.points();
  std::vector<double> prior(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) prior[i] = std::exp(-x[i] * x[i] / 2.0);
  const double v0 = weighted(x, prior).variance;

  const std::size_t nr = cfg.rungs.size();
  res.reductions.assign(nr, std::vector<double>(cfg.realizations));
  for (std::size_t k = 0; k < nr; ++k) res.widths.push_back(width_for(cfg.alpha, res.horizon / static_cast<double>(cfg.rungs[k])));

  executor.parallel_for(nr * cfg.realizations, [&](std::size_t task) {
    const std::size_t k = task / cfg.realizations;
    const std::size_t r = task % cfg.realizations;
    Rng rng = Rng::stream(stream_seed(cfg.seed, k), r);
    const double w = res.widths[k];
    const StableParams noise{cfg.alpha, w, 0.0};
    std::vector<double> p = prior;
    for (std::size_t step = 0; step < cfg.rungs[k]; ++step) {
      const DiscreteSampler sampler(p);
      const double x_true = grid.start + sampler.sample_position(rng) * grid.step;
      const double y = x_true + sample_stable(noise, rng);
      double peak = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] *= pdf.pdf((y - x[i]) / w);
        peak = std::max(peak, p[i]);
      }
      require(peak > 0.0, "scaling: posterior underflow", ErrorCategory::numerical);
      for (auto& v : p) v /= peak;
    }
    res.reductions[k][r] = v0 - weighted(x, p).variance;
  });

  for (std::size_t k = 0; k < nr; ++k) {
    res.mean_reduction.push_back(stats::mean(res.reductions[k]));
    res.reduction_se.push_back(std::sqrt(stats::variance(res.reductions[k]) / static_cast<double>(cfg.realizations)));
  }
  res.slope = slope_of(res.rungs, res.mean_reduction);

  // Bootstrap over realizations, independently per rung.
  Rng rng = Rng::stream(cfg.seed, 0xb0075ULL);
  std::vector<double> slopes;
  slopes.reserve(cfg.bootstrap_resamples);
  std::vector<double> means(nr);
  for (std::size_t b = 0; b < cfg.bootstrap_resamples; ++b) {
    for (std::size_t k = 0; k < nr; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < cfg.realizations; ++i) s += res.reductions[k][rng.index(cfg.realizations)];
      means[k] = s / static_cast<double>(cfg.realizations);
    }
    bool positive = std::all_of(means.begin(), means.end(), [](double m) { return m > 0.0; });
    if (positive) slopes.push_back(slope_of(res.rungs, means));
  }
  require(slopes.size() >= 2, "scaling: bootstrap failed (non-positive reductions)", ErrorCategory::numerical);
  res.slope_se = std::sqrt(stats::variance(slopes));
  res.slope_ci = stats::percentile_interval(slopes, 0.95);
  return res;
}

DeterministicScaling levy_collapse_scaling_deterministic(double alpha, const std::vector<std::size_t>& rungs,
                                                        double target_reduction) {
  require(rungs.size() >= 2, "scaling: need at least two ladder rungs");
  const StablePdf pdf(alpha, 1);
  const double horizon = scaling_horizon(alpha, rungs.back(), target_reduction);
  DeterministicScaling out;
  out.alpha = alpha;
  out.rungs = rungs;
  out.expected_slope = 2.0 / alpha - 1.0;

  constexpr std::size_t nx = 257;
  constexpr std::size_t ny = 2001;
  constexpr double t_max = 12.0;  // y = w sinh(t)
  for (std::size_t n : rungs) {
    const double w = width_for(alpha, horizon / static_cast<double>(n));
    double v = 1.0;
    for (std::size_t step = 0; step < n; ++step) {
      const double s = std::sqrt(v);
      const auto xg = UniformGrid::closed(-10.0 * s, 10.0 * s, nx);
      std::vector<double> prior(nx);
      for (std::size_t i = 0; i < nx; ++i) prior[i] = std::exp(-xg[i] * xg[i] / (2 * v));
      const auto tg = UniformGrid::closed(-t_max, t_max, ny);
      double mass = 0.0, acc = 0.0;
      for (std::size_t j = 0; j < ny; ++j) {
        const double y = w * std::sinh(tg[j]);
        const double jac = w * std::cosh(tg[j]) * tg.step * ((j == 0 || j + 1 == ny) ? 0.5 : 1.0);
        double z0 = 0.0, z1 = 0.0, z2 = 0.0;
        for (std::size_t i = 0; i < nx; ++i) {
          const double q = prior[i] * pdf.pdf((y - xg[i]) / w);
          z0 += q;
          z1 += q * xg[i];
          z2 += q * xg[i] * xg[i];
        }
        if (z0 <= 0.0) continue;
        const double var = z2 / z0 - (z1 / z0) * (z1 / z0);
        // Predictive density of y is z0 (up to the common normalization).
        mass += z0 * jac;
        acc += z0 * jac * var;
      }
      v = acc / mass;
    }
    out.mean_reduction.push_back(1.0 - v);
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < rungs.size(); ++i) {
    lx.push_back(std::log(static_cast<double>(rungs[i])));
    ly.push_back(std::log(out.mean_reduction[i]));
  }
  out.slope = stats::linear_fit(lx, ly).slope;
  return out;
}

}  // namespace qim::exp
