#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qim {

using cplx = std::complex<double>;

namespace fft {

/// Unnormalized DFT, y_m = sum_n x_n exp(sign * 2 pi i m n / N). sign is -1 or +1.
void dft(std::span<const cplx> in, std::span<cplx> out, int sign);
std::vector<cplx> dft(std::span<const cplx> in, int sign);

/// DFT about the grid centre c = N/2 (N even):
/// y_m = sum_n x_n exp(sign * 2 pi i (m - c)(n - c) / N).
std::vector<cplx> centered_dft(std::span<const cplx> in, int sign);

/// Chirp-z evaluation of y_m = sum_n x_n exp(i kappa (m - out_center)(n - in_center)),
/// m in [0, out_count). Bluestein's algorithm, so kappa and the centres are arbitrary reals.
std::vector<cplx> chirp_transform(std::span<const cplx> in, std::size_t out_count, double kappa,
                                  double in_center, double out_center);

std::size_t next_pow2(std::size_t n);

/// Linear cross-correlation of a real signal against a fixed real kernel,
/// out_m = sum_n signal_n * kernel[n - m + kernel_zero], m in [0, out_count), with the kernel
/// zero outside its support. The kernel spectrum is computed once; correlate() is safe to call
/// concurrently.
class Correlator {
 public:
  Correlator(std::span<const double> kernel, std::size_t kernel_zero, std::size_t signal_size,
             std::size_t out_count);
  Correlator(std::span<const double> kernel, std::size_t kernel_zero, std::size_t signal_size)
      : Correlator(kernel, kernel_zero, signal_size, signal_size) {}

  std::vector<double> correlate(std::span<const double> signal) const;
  std::size_t signal_size() const { return signal_size_; }

 private:
  std::size_t kernel_size_;
  std::size_t kernel_zero_;
  std::size_t signal_size_;
  std::size_t out_count_;
  std::size_t length_;
  std::vector<cplx> kernel_hat_;
};

}  // namespace fft
}  // namespace qim
