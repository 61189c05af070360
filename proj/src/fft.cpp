#include "qim/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "qim/errors.hpp"

namespace qim::fft {
namespace {

enum class PlanKind { c2c_forward, c2c_backward, r2c, c2r };

// FFTW's planner is not thread-safe; execution with the new-array interface is.
std::mutex planner_mutex;

fftw_plan plan_for(PlanKind kind, std::size_t n) {
  static std::map<std::pair<PlanKind, std::size_t>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex);
  const auto key = std::make_pair(kind, n);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const int len = static_cast<int>(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fftw_plan plan = nullptr;
  switch (kind) {
    case PlanKind::c2c_forward:
    case PlanKind::c2c_backward: {
      auto* a = fftw_alloc_complex(n);
      auto* b = fftw_alloc_complex(n);
      plan = fftw_plan_dft_1d(len, a, b, kind == PlanKind::c2c_forward ? FFTW_FORWARD : FFTW_BACKWARD,
                              flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case PlanKind::r2c: {
      auto* a = fftw_alloc_real(n);
      auto* b = fftw_alloc_complex(n / 2 + 1);
      plan = fftw_plan_dft_r2c_1d(len, a, b, flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
    case PlanKind::c2r: {
      auto* a = fftw_alloc_complex(n / 2 + 1);
      auto* b = fftw_alloc_real(n);
      plan = fftw_plan_dft_c2r_1d(len, a, b, flags);
      fftw_free(a);
      fftw_free(b);
      break;
    }
  }
  if (plan == nullptr) fail(ErrorCategory::resource, "FFTW failed to create a plan");
  cache.emplace(key, plan);
  return plan;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

// exp(-i kappa j^2 / 2) with the phase reduced in extended precision.
cplx chirp(long double kappa, long long j) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double jj = static_cast<long double>(j) * static_cast<long double>(j);
  const long double phase = std::fmod(kappa * jj * 0.5L, two_pi);
  return {static_cast<double>(std::cos(phase)), static_cast<double>(-std::sin(phase))};
}

cplx unit_phase(long double phase) {
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const long double reduced = std::fmod(phase, two_pi);
  return {static_cast<double>(std::cos(reduced)), static_cast<double>(std::sin(reduced))};
}

}  // namespace

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void dft(std::span<const cplx> in, std::span<cplx> out, int sign) {
  require(in.size() == out.size() && !in.empty(), "dft: size mismatch");
  require(sign == -1 || sign == 1, "dft: sign must be +-1");
  auto plan = plan_for(sign < 0 ? PlanKind::c2c_forward : PlanKind::c2c_backward, in.size());
  // FFTW does not modify the input of an out-of-place c2c transform.
  fftw_execute_dft(plan, as_fftw(const_cast<cplx*>(in.data())), as_fftw(out.data()));
}

std::vector<cplx> dft(std::span<const cplx> in, int sign) {
  std::vector<cplx> out(in.size());
  dft(in, out, sign);
  return out;
}

std::vector<cplx> centered_dft(std::span<const cplx> in, int sign) {
  const std::size_t n = in.size();
  require(n % 2 == 0, "centered_dft: length must be even");
  std::vector<cplx> work(in.begin(), in.end());
  for (std::size_t i = 1; i < n; i += 2) work[i] = -work[i];
  std::vector<cplx> out(n);
  dft(work, out, sign);
  const bool flip_all = (n / 2) % 2 == 1;
  for (std::size_t i = 0; i < n; ++i) {
    const bool odd = (i % 2) == 1;
    if (odd != flip_all) out[i] = -out[i];
  }
  return out;
}

std::vector<cplx> chirp_transform(std::span<const cplx> in, std::size_t out_count, double kappa,
                                  double in_center, double out_center) {
  const std::size_t n = in.size();
  require(n > 0 && out_count > 0, "chirp_transform: empty input or output");
  const std::size_t len = next_pow2(n + out_count - 1);
  const long double k = kappa;

  std::vector<cplx> a(len, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    const long long j = static_cast<long long>(i);
    a[i] = in[i] * unit_phase(-k * static_cast<long double>(out_center) * j) * std::conj(chirp(k, j));
  }
  std::vector<cplx> b(len, cplx{0.0, 0.0});
  for (long long j = -static_cast<long long>(n - 1); j < static_cast<long long>(out_count); ++j) {
    const auto slot = static_cast<std::size_t>((j % static_cast<long long>(len) + len) % len);
    b[slot] = chirp(k, j);
  }
  auto a_hat = dft(a, -1);
  auto b_hat = dft(b, -1);
  for (std::size_t i = 0; i < len; ++i) a_hat[i] *= b_hat[i];
  auto conv = dft(a_hat, 1);

  std::vector<cplx> out(out_count);
  const cplx global = unit_phase(k * static_cast<long double>(out_center) * in_center);
  const double scale = 1.0 / static_cast<double>(len);
  for (std::size_t m = 0; m < out_count; ++m) {
    const long long j = static_cast<long long>(m);
    const cplx post = unit_phase(-k * static_cast<long double>(in_center) * j) * std::conj(chirp(k, j));
    out[m] = conv[m] * scale * post * global;
  }
  return out;
}

Correlator::Correlator(std::span<const double> kernel, std::size_t kernel_zero,
                       std::size_t signal_size, std::size_t out_count)
    : kernel_size_(kernel.size()),
      kernel_zero_(kernel_zero),
      signal_size_(signal_size),
      out_count_(out_count) {
  require(!kernel.empty() && signal_size > 0 && out_count > 0, "Correlator: empty kernel or signal");
  require(kernel_zero < kernel.size(), "Correlator: kernel zero index out of range");
  // Output m reads the linear convolution at m + offset; keep that inside the FFT period.
  const std::size_t offset = kernel_size_ - 1 - kernel_zero_;
  length_ = next_pow2(std::max(signal_size + kernel.size() - 1, out_count + offset));
  std::vector<double> flipped(length_, 0.0);
  for (std::size_t i = 0; i < kernel_size_; ++i) flipped[i] = kernel[kernel_size_ - 1 - i];
  kernel_hat_.resize(length_ / 2 + 1);
  fftw_execute_dft_r2c(plan_for(PlanKind::r2c, length_), flipped.data(), as_fftw(kernel_hat_.data()));
}

std::vector<double> Correlator::correlate(std::span<const double> signal) const {
  require(signal.size() == signal_size_, "Correlator: signal size mismatch");
  std::vector<double> padded(length_, 0.0);
  std::copy(signal.begin(), signal.end(), padded.begin());
  std::vector<cplx> spectrum(length_ / 2 + 1);
  fftw_execute_dft_r2c(plan_for(PlanKind::r2c, length_), padded.data(), as_fftw(spectrum.data()));
  for (std::size_t i = 0; i < spectrum.size(); ++i) spectrum[i] *= kernel_hat_[i];
  fftw_execute_dft_c2r(plan_for(PlanKind::c2r, length_), as_fftw(spectrum.data()), padded.data());

  std::vector<double> out(out_count_);
  const double scale = 1.0 / static_cast<double>(length_);
  const std::size_t offset = kernel_size_ - 1 - kernel_zero_;
  for (std::size_t m = 0; m < out_count_; ++m) out[m] = padded[m + offset] * scale;
  return out;
}

}  // namespace qim::fft
