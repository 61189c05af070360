#include "qim/experiments/chained_record.hpp"

#include <cmath>

#include "qim/errors.hpp"
#include "qim/stats.hpp"

namespace qim::exp {

ChainedRecord chained_measurement_record(const SubordinatedConfig& cfg, const std::function<double(double)>& mean_x,
                                         Rng& rng, double macro_interval) {
  StableParams{cfg.alpha, 1.0, 0.0}.validate();
  require(cfg.jump_rate > 0.0 && cfg.gamma > 0.0 && cfg.horizon > 0.0, "chained record: invalid configuration");
  require(macro_interval > 0.0 && macro_interval <= cfg.horizon, "chained record: bad macro interval");
  const StableParams unit{cfg.alpha, 1.0, 0.0};
  ChainedRecord rec;
  rec.macro_interval = macro_interval;
  const auto macros = static_cast<std::size_t>(std::floor(cfg.horizon / macro_interval + 1e-9));
  rec.macro_increment.assign(macros, 0.0);
  double t = 0.0;
  while (true) {
    t += rng.exponential(cfg.jump_rate);
    if (t >= cfg.horizon) break;
    const double dr = mean_x(t) + cfg.gamma * sample_stable(unit, rng);
    rec.t.push_back(t);
    rec.increment.push_back(dr);
    const auto m = static_cast<std::size_t>(t / macro_interval);
    if (m < macros) rec.macro_increment[m] += dr;
  }
  return rec;
}

double chained_ks_to_stable(const ChainedRecord& record, const SubordinatedConfig& cfg) {
  require(!record.macro_increment.empty(), "chained record: no macro intervals", ErrorCategory::insufficient_samples);
  const double width = cfg.gamma * std::pow(cfg.jump_rate * record.macro_interval, 1.0 / cfg.alpha);
  const StablePdf law(cfg.alpha, 1);
  return stats::ks_distance(record.macro_increment, [&](double v) { return law.cdf(v / width); });
}

}  // namespace qim::exp
