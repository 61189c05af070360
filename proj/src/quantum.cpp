#include "qim/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "qim/errors.hpp"
#include "qim/stats.hpp"

namespace qim {
namespace {

constexpr double pi = std::numbers::pi;
constexpr double null_threshold = 1e-12;

// Integer offset d with (a_start - b_start) = d * step, checking that the lattices agree.
long long lattice_offset(const UniformGrid& a, const UniformGrid& b, const char* what) {
  require(std::abs(a.step - b.step) <= 1e-10 * a.step, std::string(what) + ": grid steps differ");
  const double d = (a.start - b.start) / a.step;
  const double r = std::round(d);
  require(std::abs(d - r) <= 1e-6, std::string(what) + ": grids are not on a common lattice");
  return static_cast<long long>(r);
}

double sum_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

}  // namespace

WaveFunction::WaveFunction(UniformGrid grid, std::vector<cplx> amplitudes) : grid_(grid), psi_(std::move(amplitudes)) {
  require(psi_.size() == grid_.size && !psi_.empty(), "WaveFunction: amplitude/grid size mismatch");
  const double n2 = sum_norm(psi_) * grid_.step;
  require(std::isfinite(n2), "WaveFunction: non-finite amplitudes", ErrorCategory::numerical);
  require(std::sqrt(n2) > null_threshold, "WaveFunction: state norm vanishes", ErrorCategory::null_posterior);
  const double s = 1.0 / std::sqrt(n2);
  for (auto& v : psi_) v *= s;
}

WaveFunction WaveFunction::gaussian(const UniformGrid& grid, double center, double sigma, double momentum) {
  require(sigma > 0.0, "gaussian: sigma must be positive");
  std::vector<cplx> a(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) {
    const double u = grid[i] - center;
    a[i] = std::exp(-u * u / (4 * sigma * sigma)) * std::polar(1.0, momentum * grid[i]);
  }
  return WaveFunction(grid, std::move(a));
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> d(psi_.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = std::norm(psi_[i]);
  return d;
}

double WaveFunction::norm2() const { return sum_norm(psi_) * grid_.step; }

double fidelity(const WaveFunction& a, const WaveFunction& b) {
  require(a.size() == b.size(), "fidelity: size mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return std::norm(s * a.grid().step);
}

void HarmonicTrap::validate() const { require(length_scale > 0.0, "trap: length_scale must be positive"); }

WaveFunction HarmonicTrap::ground_state(const UniformGrid& grid) const {
  validate();
  std::vector<cplx> a(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) a[i] = std::exp(-grid[i] * grid[i] / (2 * length_scale * length_scale));
  return WaveFunction(grid, std::move(a));
}

UniformGrid HarmonicTrap::matched_grid(std::size_t n) const {
  validate();
  require(n >= 4 && n % 2 == 0, "matched_grid: n must be even and at least 4");
  return UniformGrid::centered(n, std::sqrt(2 * pi * length_scale * length_scale / static_cast<double>(n)));
}

bool HarmonicTrap::is_matched(const UniformGrid& g, double rel_tol) const {
  const double lhs = static_cast<double>(g.size) * g.step * g.step;
  const double rhs = 2 * pi * length_scale * length_scale;
  return std::abs(lhs - rhs) <= rel_tol * rhs && g.size % 2 == 0 &&
         std::abs(g.start + static_cast<double>(g.size / 2) * g.step) <= 1e-9 * g.step;
}

WaveFunction apply_profile(const WaveFunction& psi, const std::vector<cplx>& profile) {
  require(profile.size() == psi.size(), "apply_profile: size mismatch");
  std::vector<cplx> out(psi.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = profile[i] * psi[i];
  const double n2 = sum_norm(out) * psi.grid().step;
  require(std::sqrt(n2) > null_threshold, "collapse: posterior norm below 1e-12 (result incompatible with the state)",
          ErrorCategory::null_posterior);
  return WaveFunction(psi.grid(), std::move(out));
}

WaveFunction apply_collapse(const WaveFunction& psi, const CollapseKernel& kernel, double a) {
  const auto& g = psi.grid();
  const auto& u = kernel.z_grid;
  require(std::abs(g.step - u.step) <= 1e-10 * g.step, "apply_collapse: grid steps differ");
  // z_n - a = u_0 + j dz  =>  j = n + (z_0 - a - u_0) / dz
  const double d = (g.start - a - u.start) / g.step;
  const double r = std::round(d);
  require(std::abs(d - r) <= 1e-6, "apply_collapse: location a is off the kernel lattice");
  const auto j0 = static_cast<long long>(r);
  std::vector<cplx> profile(g.size);
  for (std::size_t n = 0; n < g.size; ++n) profile[n] = kernel.at_index(static_cast<long long>(n) + j0);
  return apply_profile(psi, profile);
}

DetectionModel::DetectionModel(const CollapseKernel& kernel, const UniformGrid& state_grid)
    : kernel_(kernel),
      state_grid_(state_grid),
      correlator_(
          [&] {
            std::vector<double> k(kernel.values.size());
            for (std::size_t i = 0; i < k.size(); ++i) k[i] = std::norm(kernel.values[i]);
            return k;
          }(),
          kernel.values.size() - 1, state_grid.size, state_grid.size + kernel.values.size() - 1) {
  lattice_offset(state_grid, kernel.z_grid, "detection");
  const auto& u = kernel.z_grid;
  a_grid_ = UniformGrid{state_grid.start - u.back(), state_grid.step, state_grid.size + u.size - 1};
}

Detection DetectionModel::distribution(const WaveFunction& psi) const {
  require(psi.size() == state_grid_.size && std::abs(psi.grid().start - state_grid_.start) <= 1e-9 * state_grid_.step,
          "detection: state grid differs from the model grid");
  const auto rho = psi.density();
  Detection d;
  d.a_grid = a_grid_;
  d.density = correlator_.correlate(rho);
  double total = 0.0;
  for (auto& v : d.density) {
    v = std::max(v, 0.0) * state_grid_.step;
    total += v;
  }
  total *= a_grid_.step;
  d.total = total;
  if (total > 0.0)
    for (auto& v : d.density) v /= total;
  return d;
}

Detection detection_distribution(const WaveFunction& psi, const CollapseKernel& kernel) {
  return DetectionModel(kernel, psi.grid()).distribution(psi);
}

PhotonEmitter::PhotonEmitter(const ApertureProfile& aperture, const UniformGrid& state_grid, double kernel_half_width)
    : aperture_(aperture), eta_(qim::capture_fraction(aperture)) {
  require(kernel_half_width > 0.0, "PhotonEmitter: kernel half width must be positive");
  const double dz = state_grid.step;
  // Kernel lattice aligned with the state lattice and covering [-half, half].
  const double u0 = state_grid.start + std::round((-kernel_half_width - state_grid.start) / dz) * dz;
  const auto nk = static_cast<std::size_t>(std::ceil((kernel_half_width - u0) / dz)) + 1;
  const UniformGrid kgrid{u0, dz, nk};

  const double g = aperture.azimuthal_fraction();
  const auto chi_c = aperture.chi_complement();
  double miss = 0.0;
  for (std::size_t i = 0; i < chi_c.size(); ++i)
    miss += ((i == 0 || i + 1 == chi_c.size()) ? 0.5 : 1.0) * std::norm(chi_c[i]);
  miss *= aperture.xi_grid.step;
  weight_window_ = g * miss;
  weight_outside_ = std::max(0.0, 1.0 - g);

  ApertureProfile bare = aperture;
  bare.transmission.assign(aperture.xi_grid.size, cplx{0.0, 0.0});
  bare.capture_lo = -1.0;
  bare.capture_hi = 1.0;
  models_.emplace_back(collapse_kernel(aperture, kgrid), state_grid);
  models_.emplace_back(complement_kernel(aperture, kgrid), state_grid);
  models_.emplace_back(complement_kernel(bare, kgrid), state_grid);
}

const DetectionModel& PhotonEmitter::model(Channel c) const { return models_[static_cast<std::size_t>(c)]; }
const CollapseKernel& PhotonEmitter::kernel(Channel c) const { return model(c).kernel(); }

double PhotonEmitter::detection_probability(const WaveFunction& psi) const {
  const auto d = model(Channel::detected).distribution(psi);
  return std::clamp(aperture_.azimuthal_fraction() * d.total / aperture_.wavelength, 0.0, 1.0);
}

MeasurementOutcome PhotonEmitter::emit_in(const WaveFunction& psi, Channel c, Rng& rng) const {
  const auto d = model(c).distribution(psi);
  require(d.total > 0.0, "emission: channel has zero probability for this state", ErrorCategory::null_posterior);
  const DiscreteSampler sampler(d.density);
  MeasurementOutcome out;
  out.channel = c;
  out.detected = c == Channel::detected;
  out.a = d.a_grid[sampler.sample_index(rng)];
  out.posterior = apply_collapse(psi, kernel(c), out.a);
  return out;
}

MeasurementOutcome PhotonEmitter::emit(const WaveFunction& psi, Rng& rng) const {
  const double p = detection_probability(psi);
  Channel c = Channel::detected;
  if (rng.uniform() >= p) {
    const double w = weight_window_ + weight_outside_;
    if (w > 0.0) c = rng.uniform() * w < weight_window_ ? Channel::undetected_window : Channel::undetected_outside;
  }
  auto out = emit_in(psi, c, rng);
  out.detection_probability = p;
  return out;
}

MeasurementOutcome emit_photon(const WaveFunction& psi, const ApertureProfile& aperture, Rng& rng) {
  return PhotonEmitter(aperture, psi.grid()).emit(psi, rng);
}

QuarterPeriodResult quarter_period(const WaveFunction& psi, const HarmonicTrap& trap, double warn_threshold) {
  trap.validate();
  const auto& g = psi.grid();
  const double x0sq = trap.length_scale * trap.length_scale;
  std::vector<cplx> y;
  if (trap.is_matched(g)) {
    y = fft::centered_dft(psi.amplitudes(), -1);
  } else {
    const double c = -g.start / g.step;
    y = fft::chirp_transform(psi.amplitudes(), g.size, -g.step * g.step / x0sq, c, c);
  }
  const cplx pre = std::polar(g.step / std::sqrt(2 * pi * x0sq), -pi / 4);
  for (auto& v : y) v *= pre;
  QuarterPeriodResult r;
  r.state = WaveFunction(g, std::move(y));
  const auto rho = r.state.density();
  const std::size_t edge = std::max<std::size_t>(1, g.size / 100);
  double e = 0.0;
  for (std::size_t i = 0; i < edge; ++i) e += rho[i] + rho[g.size - 1 - i];
  r.edge_mass = e * g.step;
  r.aliasing_warning = r.edge_mass > warn_threshold;
  return r;
}

std::vector<cplx> momentum_amplitudes(const WaveFunction& psi, const UniformGrid& p_grid) {
  const auto& g = psi.grid();
  auto y = fft::chirp_transform(psi.amplitudes(), p_grid.size, -g.step * p_grid.step, -g.start / g.step,
                                -p_grid.start / p_grid.step);
  const double s = g.step / std::sqrt(2 * pi);
  for (auto& v : y) v *= s;
  return y;
}

WignerGrid wigner(const WaveFunction& psi, const UniformGrid& x_grid, const UniformGrid& p_grid) {
  const auto& g = psi.grid();
  require(p_grid.size >= 2 && x_grid.size >= 1, "wigner: empty grid");
  WignerGrid w{x_grid, p_grid, std::vector<double>(x_grid.size * p_grid.size, 0.0)};
  const auto& a = psi.amplitudes();
  for (std::size_t ix = 0; ix < x_grid.size; ++ix) {
    const auto idx = g.index_of(x_grid[ix]);
    require(idx.has_value(), "wigner: X point is not on the state lattice");
    const std::size_t i = *idx;
    const std::size_t span = std::min(i, g.size - 1 - i);
    std::vector<cplx> c(2 * span + 1);
    for (std::size_t k = 0; k < c.size(); ++k) {
      const long long j = static_cast<long long>(k) - static_cast<long long>(span);
      c[k] = std::conj(a[static_cast<std::size_t>(static_cast<long long>(i) + j)]) *
             a[static_cast<std::size_t>(static_cast<long long>(i) - j)];
    }
    const auto row = fft::chirp_transform(c, p_grid.size, 2.0 * p_grid.step * g.step, static_cast<double>(span),
                                          -p_grid.start / p_grid.step);
    for (std::size_t ip = 0; ip < p_grid.size; ++ip) w.values[ix * p_grid.size + ip] = row[ip].real() * g.step / pi;
  }
  return w;
}

Moments moments(const WaveFunction& psi) {
  const auto x = psi.grid().points();
  const auto rho = psi.density();
  const auto gm = stats::grid_moments(x, rho);
  Moments m;
  m.mean = gm.mean;
  m.variance = gm.variance;
  m.excess_kurtosis = gm.excess_kurtosis;
  m.iqr = stats::grid_quantile(x, rho, 0.75) - stats::grid_quantile(x, rho, 0.25);
  const std::size_t n = rho.size();
  const std::size_t edge = std::max<std::size_t>(1, n / 20);
  double outer = 0.0, all = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double c = rho[i] * (x[i] - gm.mean) * (x[i] - gm.mean);
    all += c;
    if (i < edge || i >= n - edge) outer += c;
  }
  m.tail_dominated = all > 0.0 && outer > 0.05 * all;
  return m;
}

void write_state_csv(std::ostream& os, const WaveFunction& psi) {
  os.precision(17);
  os << "z,re,im,density\n";
  for (std::size_t i = 0; i < psi.size(); ++i)
    os << psi.grid()[i] << "," << psi[i].real() << "," << psi[i].imag() << "," << std::norm(psi[i]) << "\n";
}

void write_wigner_csv(std::ostream& os, const WignerGrid& w) {
  os.precision(12);
  os << "X,P,W\n";
  for (std::size_t ix = 0; ix < w.x_grid.size; ++ix)
    for (std::size_t ip = 0; ip < w.p_grid.size; ++ip) os << w.x_grid[ix] << "," << w.p_grid[ip] << "," << w.at(ix, ip) << "\n";
}

}  // namespace qim
