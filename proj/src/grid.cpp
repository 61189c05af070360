#include "qim/grid.hpp"

#include <cmath>

#include "qim/errors.hpp"

namespace qim {

UniformGrid UniformGrid::centered(std::size_t n, double step) {
  require(n >= 2, "grid needs at least two points");
  require(step > 0.0, "grid step must be positive");
  return {-static_cast<double>(n / 2) * step, step, n};
}

UniformGrid UniformGrid::closed(double lo, double hi, std::size_t n) {
  require(n >= 2, "grid needs at least two points");
  require(hi > lo, "grid bounds must be increasing");
  return {lo, (hi - lo) / static_cast<double>(n - 1), n};
}

std::vector<double> UniformGrid::points() const {
  std::vector<double> out(size);
  for (std::size_t i = 0; i < size; ++i) out[i] = (*this)[i];
  return out;
}

std::optional<std::size_t> UniformGrid::index_of(double x, double tol) const {
  const double pos = position(x);
  const double rounded = std::round(pos);
  if (std::abs(pos - rounded) > tol || rounded < 0.0 || rounded >= static_cast<double>(size)) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(rounded);
}

bool same_lattice(const UniformGrid& a, const UniformGrid& b, double rel_tol) {
  if (std::abs(a.step - b.step) > rel_tol * a.step) return false;
  const double offset = (a.start - b.start) / a.step;
  return std::abs(offset - std::round(offset)) < 1e-6;
}

}  // namespace qim
