#pragma once

#include <functional>
#include <string>

namespace qim::exp {

/// Kernel intensity Omega^2(u) as a function of u = x - a.
using Intensity = std::function<double(double)>;

Intensity gaussian_intensity(double sd);       // exp(-u^2 / 2 sd^2)
Intensity cauchy_intensity(double half_width);  // 1 / (1 + u^2 / g^2)
Intensity sinc_intensity(double width);        // sinc^2(u / W), first zeros at +-W
Intensity named_intensity(const std::string& kind, double width);

/// Half width at half maximum of a symmetric, peaked intensity.
double half_width_half_max(const Intensity& omega2, double scale_hint);

struct ReductionResult {
  double a_coef = 0.0;  // Omega^2(x) ~ exp(a x - b x^2) near the state
  double b_coef = 0.0;
  double mu = 0.0;   // predicted posterior mean
  double tau = 0.0;  // predicted posterior standard deviation
  double mu_numeric = 0.0;
  double tau_numeric = 0.0;
  double kernel_width = 0.0;  // HWHM of Omega^2
};

/// Gaussian state with |psi|^2 of standard deviation sigma centred at 0, kernel centred at
/// result a. log Omega^2 is fitted by a Gaussian-weighted quadratic, the weight refined to the
/// predicted posterior until self-consistent; the prediction is
/// mu = a sigma^2 / (1 + 2 b sigma^2), tau = sigma / sqrt(1 + 2 b sigma^2), and is checked against
/// direct multiplication on a grid. Throws regime_violation if the kernel HWHM is below 5 sigma.
ReductionResult gaussian_reduction_analytics(const Intensity& omega2, double sigma, double a,
                                             std::size_t grid_points = 4097);

}  // namespace qim::exp
