#include "qim/experiments/abs_position.hpp"

#include <algorithm>
#include <cmath>

#include "qim/errors.hpp"
#include "qim/optics.hpp"
#include "qim/rng.hpp"
#include "qim/stats.hpp"

namespace qim::exp {
namespace {

// Densities below this fraction of the peak are left out of the interference sum.
constexpr double support_floor = 1e-30;

CollapseKernel symmetric_kernel(const UniformGrid& state_grid, double half_width, long long& half) {
  require(half_width > 0.0, "abs position: kernel half width must be positive");
  half = static_cast<long long>(std::ceil(half_width / state_grid.step));
  const UniformGrid k{-static_cast<double>(half) * state_grid.step, state_grid.step, static_cast<std::size_t>(2 * half + 1)};
  return collapse_kernel(preset("full"), k);
}

}  // namespace

AbsPositionMeter::AbsPositionMeter(const UniformGrid& state_grid, double kernel_half_width)
    : state_grid_(state_grid),
      kernel_(symmetric_kernel(state_grid, kernel_half_width, half_)),
      model_(kernel_, state_grid) {
  const double zero = -state_grid.start / state_grid.step;
  require(std::abs(zero - std::round(zero)) <= 1e-6 && zero >= 0.0 && zero < static_cast<double>(state_grid.size),
          "abs position: the state grid must contain z = 0");
  state_zero_ = std::llround(zero);
}

Detection AbsPositionMeter::distribution(const WaveFunction& psi) const {
  const auto direct = model_.distribution(psi);
  const auto rho = psi.density();
  const double dz = state_grid_.step;
  const auto& ag = direct.a_grid;
  const double a0 = -ag.start / dz;
  const auto zero = std::llround(a0);
  require(std::abs(a0 - static_cast<double>(zero)) <= 1e-6, "abs position: detection lattice misses a = 0");
  const auto count = static_cast<std::size_t>(static_cast<long long>(ag.size) - zero);

  Detection out;
  out.a_grid = UniformGrid{0.0, dz, count};
  out.density.assign(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const long long ip = zero + static_cast<long long>(j);
    const long long im = zero - static_cast<long long>(j);
    const double pp = direct.density[static_cast<std::size_t>(ip)];
    const double pm = im >= 0 ? direct.density[static_cast<std::size_t>(im)] : 0.0;
    out.density[j] = 0.5 * (pp + pm) * direct.total;
  }

  // Interference term Re sum_z rho(z) A(z - a) conj A(z + a) dz, nonzero only for a <= kernel reach.
  const double peak = *std::max_element(rho.begin(), rho.end());
  long long lo = 0, hi = static_cast<long long>(rho.size());
  while (lo < hi && rho[static_cast<std::size_t>(lo)] < support_floor * peak) ++lo;
  while (hi > lo && rho[static_cast<std::size_t>(hi - 1)] < support_floor * peak) --hi;
  const auto& kv = kernel_.values;
  const long long nk = static_cast<long long>(kv.size());
  for (long long j = 0; j <= half_ && j < static_cast<long long>(count); ++j) {
    // Kernel index of z_n -+ a is n - state_zero_ -+ j + half_.
    const long long n_lo = std::max({lo, state_zero_ + j - half_, state_zero_ - j - half_});
    const long long n_hi = std::min({hi, state_zero_ + j - half_ + nk, state_zero_ - j - half_ + nk});
    double s = 0.0;
    for (long long n = n_lo; n < n_hi; ++n) {
      const cplx p = kv[static_cast<std::size_t>(n - state_zero_ - j + half_)];
      const cplx m = kv[static_cast<std::size_t>(n - state_zero_ + j + half_)];
      s += rho[static_cast<std::size_t>(n)] * (p * std::conj(m)).real();
    }
    out.density[static_cast<std::size_t>(j)] += s * dz;
  }

  double total = 0.0;
  for (auto& v : out.density) {
    v = std::max(v, 0.0);
    total += v;
  }
  total *= dz;
  require(total > 0.0, "abs position: zero detection probability", ErrorCategory::null_posterior);
  out.total = total;
  for (auto& v : out.density) v /= total;
  return out;
}

WaveFunction AbsPositionMeter::collapse(const WaveFunction& psi, double a) const {
  require(a >= 0.0, "abs position: result must be non-negative");
  const double d = a / state_grid_.step;
  require(std::abs(d - std::round(d)) <= 1e-6, "abs position: result off the lattice");
  const auto j = std::llround(d);
  std::vector<cplx> profile(psi.size());
  for (std::size_t n = 0; n < profile.size(); ++n) {
    const long long rel = static_cast<long long>(n) - state_zero_ + half_;
    profile[n] = kernel_.at_index(rel - j) + kernel_.at_index(rel + j);
  }
  return apply_profile(psi, profile);
}

MeasurementOutcome AbsPositionMeter::measure(const WaveFunction& psi, Rng& rng) const {
  const auto d = distribution(psi);
  const DiscreteSampler sampler(d.density);
  MeasurementOutcome out;
  out.detected = true;
  out.channel = Channel::detected;
  out.detection_probability = 1.0;
  out.a = d.a_grid[sampler.sample_index(rng)];
  out.posterior = collapse(psi, out.a);
  return out;
}

MeasurementOutcome abs_position_measurement(const WaveFunction& psi, Rng& rng) {
  return AbsPositionMeter(psi.grid()).measure(psi, rng);
}

std::vector<AbsPositionTrajectory> abs_position_trajectories(const AbsPositionConfig& cfg, const Executor& executor) {
  require(cfg.packet_sigma > 0.0 && cfg.grid_points >= 16 && cfg.grid_step > 0.0, "abs position: bad configuration");
  const auto grid = UniformGrid::centered(cfg.grid_points, cfg.grid_step);
  const AbsPositionMeter meter(grid, cfg.kernel_half_width);

  std::vector<cplx> amp(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double s2 = 4 * cfg.packet_sigma * cfg.packet_sigma;
    const double r = grid[i] - cfg.packet_center, l = grid[i] + cfg.packet_center;
    amp[i] = std::exp(-r * r / s2) + (cfg.symmetric ? std::exp(-l * l / s2) : 0.0);
  }
  const WaveFunction initial(grid, std::move(amp));
  const long long zero = std::llround(-grid.start / grid.step);

  std::vector<AbsPositionTrajectory> out(cfg.trajectories);
  executor.parallel_for(cfg.trajectories, [&](std::size_t t) {
    Rng rng = Rng::stream(cfg.seed, t);
    auto psi = initial;
    auto& rec = out[t];
    for (std::size_t m = 0; m < cfg.measurements; ++m) {
      auto o = meter.measure(psi, rng);
      psi = std::move(o.posterior);
      rec.results.push_back(o.a);
      const auto rho = psi.density();
      double s = 0.0, w = 0.0;
      for (std::size_t i = 0; i < rho.size(); ++i) {
        s += rho[i] * std::abs(grid[i]);
        w += rho[i];
      }
      rec.mean_abs.push_back(s / w);
    }
    const auto rho = psi.density();
    const auto x = grid.points();
    std::vector<double> right(rho.size(), 0.0), left(rho.size(), 0.0), absw(rho.size(), 0.0);
    double peak = 0.0, asym = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      (x[i] > 0.0 ? right : left)[i] = rho[i];
      peak = std::max(peak, rho[i]);
      const long long mirror = 2 * zero - static_cast<long long>(i);
      if (mirror >= 0 && mirror < static_cast<long long>(rho.size()))
        asym = std::max(asym, std::abs(rho[i] - rho[static_cast<std::size_t>(mirror)]));
    }
    double mass_r = 0.0, mass_l = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      mass_r += right[i];
      mass_l += left[i];
    }
    const double floor = 1e-12 * (mass_r + mass_l);
    rec.right_mass = mass_r / (mass_r + mass_l);
    rec.right_kurtosis = mass_r > floor ? stats::grid_moments(x, right).excess_kurtosis : 0.0;
    rec.left_kurtosis = mass_l > floor ? stats::grid_moments(x, left).excess_kurtosis : 0.0;
    rec.parity_error = asym / peak;
    std::vector<double> ax(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = std::abs(x[i]);
    rec.final_width = std::sqrt(stats::grid_moments(ax, rho).variance);
  });
  return out;
}

}  // namespace qim::exp
