#include "qim/experiments/anomalous_diffusion.hpp"

#include <cmath>

#include "qim/errors.hpp"
#include "qim/optics.hpp"
#include "qim/quantum.hpp"
#include "qim/rng.hpp"
#include "qim/stats.hpp"

namespace qim::exp {
namespace {

double mean_position(const WaveFunction& psi) {
  const auto& g = psi.grid();
  double s = 0.0, w = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double r = std::norm(psi[i]);
    s += r * g[i];
    w += r;
  }
  return s / w;
}

// psi'(z_n) = psi(z_{n + shift}), zero beyond the grid.
WaveFunction shifted(const WaveFunction& psi, long long shift) {
  const auto n = static_cast<long long>(psi.size());
  std::vector<cplx> out(psi.size(), cplx{0.0, 0.0});
  for (long long i = 0; i < n; ++i) {
    const long long j = i + shift;
    if (j >= 0 && j < n) out[static_cast<std::size_t>(i)] = psi[static_cast<std::size_t>(j)];
  }
  return WaveFunction(psi.grid(), std::move(out));
}

}  // namespace

PostSelect parse_post_select(const std::string& s) {
  if (s == "none") return PostSelect::none;
  if (s == "first_emission") return PostSelect::first_emission;
  fail(ErrorCategory::invalid_argument, "unknown post-selection policy: " + s);
}

LossUnraveling parse_loss_unraveling(const std::string& s) {
  if (s == "recoil_kick") return LossUnraveling::recoil_kick;
  if (s == "image_position") return LossUnraveling::image_position;
  fail(ErrorCategory::invalid_argument, "unknown loss unraveling: " + s);
}

std::string to_string(PostSelect p) { return p == PostSelect::none ? "none" : "first_emission"; }
std::string to_string(LossUnraveling u) { return u == LossUnraveling::recoil_kick ? "recoil_kick" : "image_position"; }

DiffusionResult anomalous_diffusion(const DiffusionConfig& cfg, const Executor& executor) {
  require(cfg.efficiency > 0.0 && cfg.efficiency <= 1.0, "diffusion: efficiency must lie in (0, 1]");
  require(cfg.trajectories >= 1 && cfg.detections >= 1, "diffusion: need trajectories and detections");
  const HarmonicTrap trap{cfg.trap_length};
  trap.validate();
  const auto grid = trap.matched_grid(cfg.grid_points);
  const auto aperture = preset(cfg.aperture);
  const PhotonEmitter emitter(aperture, grid, cfg.kernel_half_width);
  const auto& detected = emitter.model(Channel::detected);
  const auto ground = trap.ground_state(grid);
  const double x0sq = cfg.trap_length * cfg.trap_length;
  const double k = aperture.wavenumber();

  // Recoil of an undetected photon: xi drawn from the in-window complement pattern or, outside the
  // mirrors' azimuthal window, from the bare dipole pattern.
  const double ww = emitter.window_weight(), wo = emitter.outside_weight();
  const auto chi_c = aperture.chi_complement();
  std::vector<double> kick_weights(chi_c.size());
  for (std::size_t i = 0; i < chi_c.size(); ++i)
    kick_weights[i] = ww * std::norm(chi_c[i]) + wo * emission_pattern(aperture.xi_grid[i]);
  const DiscreteSampler kick(kick_weights);

  DiffusionResult res;
  res.capture_fraction = emitter.capture_fraction();
  res.records.resize(cfg.trajectories);
  executor.parallel_for(cfg.trajectories, [&](std::size_t t) {
    auto& rec = res.records[t];
    rec.seed = t;
    Rng rng = Rng::stream(cfg.seed, t);
    auto psi = ground;
    double x_off = 0.0, p_off = 0.0;  // state = exp(i p_off z) psi(z - x_off)
    try {
      for (std::size_t d = 0; d < cfg.detections; ++d) {
        std::size_t losses = 0;
        while (!rng.bernoulli(cfg.efficiency)) {
          ++losses;
          if (cfg.loss_unraveling == LossUnraveling::recoil_kick) {
            const double xi = aperture.xi_grid.start + kick.sample_position(rng) * aperture.xi_grid.step;
            p_off += k * xi;
          } else {
            const double w = ww + wo;
            const auto c = rng.uniform() * w < ww ? Channel::undetected_window : Channel::undetected_outside;
            psi = emitter.emit_in(psi, c, rng).posterior;
          }
        }
        const auto dist = detected.distribution(psi);
        require(dist.total > 0.0, "detection distribution vanishes", ErrorCategory::null_posterior);
        const DiscreteSampler sampler(dist.density);
        const double a = dist.a_grid[sampler.sample_index(rng)];
        const double before = mean_position(psi);
        psi = apply_collapse(psi, emitter.kernel(Channel::detected), a);
        const double after = mean_position(psi);
        rec.delta_x.push_back(after - before);
        rec.losses.push_back(losses);
        rec.post_selected.push_back(cfg.post_select == PostSelect::none || losses == 0);
        rec.mean_x.push_back(after + x_off);

        // Move the localized posterior back to the grid centre by whole lattice steps; the shift
        // joins the frame offset, so the centre of the state cannot drift into the grid edges.
        const auto shift = static_cast<long long>(std::llround(after / grid.step));
        if (shift != 0) {
          psi = shifted(psi, shift);
          x_off += static_cast<double>(shift) * grid.step;
        }
        auto q = quarter_period(psi, trap);
        rec.max_edge_mass = std::max(rec.max_edge_mass, q.edge_mass);
        psi = std::move(q.state);
        const double nx = x0sq * p_off, np = -x_off / x0sq;
        x_off = nx;
        p_off = np;
      }
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::null_posterior) throw;
      rec.aborted = true;
      rec.abort_reason = e.what();
    }
  });

  std::vector<double> pooled;
  std::size_t detections = 0, losses = 0;
  for (const auto& rec : res.records) {
    if (rec.aborted) {
      ++res.aborted;
      continue;
    }
    for (std::size_t i = 0; i < rec.delta_x.size(); ++i) {
      ++detections;
      losses += rec.losses[i];
      if (rec.post_selected[i]) pooled.push_back(rec.delta_x[i]);
    }
  }
  res.samples = pooled.size();
  res.mean_losses = detections > 0 ? static_cast<double>(losses) / static_cast<double>(detections) : 0.0;
  res.beta = beta_estimator(pooled, cfg.beta);
  for (std::size_t n = 16; n <= pooled.size(); n *= 2)
    res.variance_growth.push_back({n, stats::variance(std::span<const double>(pooled.data(), n))});
  return res;
}

}  // namespace qim::exp
