#include "qim/experiments/superposition.hpp"

#include <algorithm>
#include <cmath>

#include "qim/errors.hpp"
#include "qim/rng.hpp"

namespace qim::exp {

PacketSplit split_packets(const WaveFunction& psi, double a) {
  const auto& g = psi.grid();
  const auto rho = psi.density();
  double m[2][3] = {};  // [side][moment]
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double z = g[i];
    // A node at exactly z = a is shared between the halves.
    const double right = z > a ? 1.0 : (z < a ? 0.0 : 0.5);
    const double w[2] = {rho[i] * (1.0 - right), rho[i] * right};
    for (int s = 0; s < 2; ++s) {
      m[s][0] += w[s];
      m[s][1] += w[s] * z;
      m[s][2] += w[s] * z * z;
    }
  }
  PacketSplit out;
  const double total = m[0][0] + m[1][0];
  out.smaller_probability = std::min(m[0][0], m[1][0]) / total;
  double mean[2], sd[2];
  for (int s = 0; s < 2; ++s) {
    mean[s] = m[s][0] > 0.0 ? m[s][1] / m[s][0] : a;
    sd[s] = m[s][0] > 0.0 ? std::sqrt(std::max(0.0, m[s][2] / m[s][0] - mean[s] * mean[s])) : 0.0;
  }
  out.separation = mean[1] - mean[0];
  out.left_width = sd[0];
  out.right_width = sd[1];

  const double peak = *std::max_element(rho.begin(), rho.end());
  for (std::size_t i = 1; i + 1 < rho.size(); ++i)
    if (rho[i] > 0.1 * peak && rho[i] >= rho[i - 1] && rho[i] > rho[i + 1]) ++out.dominant_peaks;
  return out;
}

WaveFunction superposition_posterior(const HarmonicTrap& trap, const PhotonEmitter& emitter, const UniformGrid& grid,
                                     double a) {
  return apply_collapse(trap.ground_state(grid), emitter.kernel(Channel::detected), a);
}

SuperpositionResult prepare_superposition(const SuperpositionConfig& cfg, const Executor& executor) {
  require(cfg.detections >= 1, "superposition: need at least one detection");
  require(cfg.grid_points >= 16 && cfg.grid_step > 0.0, "superposition: bad grid");
  const HarmonicTrap trap{cfg.trap_length};
  trap.validate();
  const auto grid = UniformGrid::centered(cfg.grid_points, cfg.grid_step);
  const PhotonEmitter emitter(preset(cfg.aperture), grid, cfg.kernel_half_width);
  const auto ground = trap.ground_state(grid);

  // The state is reset after every undetected emission, so every attempt starts from the ground
  // state and the detection distribution is the same for all of them.
  const auto detection = emitter.model(Channel::detected).distribution(ground);
  const double p_det = emitter.detection_probability(ground);
  require(p_det > 0.0, "superposition: aperture never detects", ErrorCategory::numerical);
  const DiscreteSampler sampler(detection.density);

  std::vector<SuperpositionTrial> trials(cfg.detections);
  std::vector<WaveFunction> first(1);
  executor.parallel_for(cfg.detections, [&](std::size_t t) {
    Rng rng = Rng::stream(cfg.seed, t);
    SuperpositionTrial rec;
    do {
      ++rec.emissions;
    } while (!rng.bernoulli(p_det));
    rec.a = detection.a_grid[sampler.sample_index(rng)];
    auto post = apply_collapse(ground, emitter.kernel(Channel::detected), rec.a);
    rec.split = split_packets(post, rec.a);
    trials[t] = rec;
    if (t == 0) first[0] = std::move(post);
  });

  SuperpositionResult res;
  res.final_state = std::move(first[0]);
  auto& st = res.stats;
  st.capture_fraction = p_det;
  st.detections = cfg.detections;
  std::size_t ge = 0;
  double sep = 0.0, width = 0.0;
  for (const auto& r : trials) {
    st.trials += r.emissions;
    st.smaller_probability.push_back(r.split.smaller_probability);
    if (r.split.smaller_probability >= 1.0 / 3.0) ++ge;
    sep += r.split.separation;
    width += 0.5 * (r.split.left_width + r.split.right_width);
  }
  const auto n = static_cast<double>(cfg.detections);
  st.fraction_ps_ge_one_third = static_cast<double>(ge) / n;
  st.mean_separation = sep / n;
  st.mean_width = width / n;
  st.records = std::move(trials);
  return res;
}

}  // namespace qim::exp
