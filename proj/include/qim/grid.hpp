#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace qim {

/// Uniform 1-D sampling x_i = start + i * step, i in [0, size).
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  std::size_t size = 0;

  double operator[](std::size_t i) const { return start + step * static_cast<double>(i); }
  double front() const { return start; }
  double back() const { return (*this)[size - 1]; }
  double span() const { return step * static_cast<double>(size); }

  /// Grid with x_i = (i - n/2) * step, so that x = 0 sits on index n/2.
  static UniformGrid centered(std::size_t n, double step);
  /// Grid with both endpoints included.
  static UniformGrid closed(double lo, double hi, std::size_t n);

  std::vector<double> points() const;

  /// Index whose coordinate equals x to within tol * step, if any.
  std::optional<std::size_t> index_of(double x, double tol = 1e-6) const;

  /// Fractional index position of x (may be out of range).
  double position(double x) const { return (x - start) / step; }
};

bool same_lattice(const UniformGrid& a, const UniformGrid& b, double rel_tol = 1e-10);

}  // namespace qim
