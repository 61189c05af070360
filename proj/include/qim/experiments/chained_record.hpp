#pragma once

#include <functional>
#include <vector>

#include "qim/levy.hpp"
#include "qim/rng.hpp"

namespace qim::exp {

struct ChainedRecord {
  std::vector<double> t;          // event times
  std::vector<double> increment;  // dr_i = <X>(t_i) + gamma dL_i
  /// Record integrated over consecutive macro intervals [m, m + 1) * macro_interval.
  std::vector<double> macro_increment;
  double macro_interval = 1.0;
};

/// Measurement record driven by a Poisson-subordinated stable process: at every event the record
/// advances by <X> + gamma dL, with dL a unit-time stable increment; between events it is constant.
ChainedRecord chained_measurement_record(const SubordinatedConfig& cfg, const std::function<double(double)>& mean_x,
                                         Rng& rng, double macro_interval = 1.0);

/// KS distance between the macro increments and the stable law of width gamma (rate * interval)^{1/alpha},
/// the law of the matching direct path. Meaningful for <X> = 0.
double chained_ks_to_stable(const ChainedRecord& record, const SubordinatedConfig& cfg);

}  // namespace qim::exp
