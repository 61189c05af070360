// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any criterion fails.
// Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "qim/executor.hpp"
#include "qim/experiments/anomalous_diffusion.hpp"
#include "qim/experiments/beta_estimator.hpp"
#include "qim/experiments/collapse_to_gaussian.hpp"
#include "qim/experiments/gaussian_reduction.hpp"
#include "qim/experiments/levy_scaling.hpp"
#include "qim/experiments/superposition.hpp"
#include "qim/harness.hpp"
#include "qim/levy.hpp"
#include "qim/optics.hpp"
#include "qim/quantum.hpp"

using namespace qim;
using oracle::pi;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t seed = 1;
int failures = 0;
std::vector<int> selected;  // criterion ids from the command line; empty runs all

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("CRITERION %2d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void criterion(int id, const char* name, const std::function<std::pair<bool, std::string>()>& body) {
  if (!selected.empty() && std::find(selected.begin(), selected.end(), id) == selected.end()) return;
  try {
    const auto [pass, detail] = body();
    report(id, name, pass, detail);
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::pair<bool, std::string> cauchy_density() {
  const double s = 1.7;
  const auto g = UniformGrid::closed(-50 * s, 50 * s, 20001);
  const Stopwatch w;
  const auto d = stable_density({1.0, s, 0.0}, g);
  const double t = w.seconds();
  double err = 0.0;
  for (std::size_t i = 0; i < g.size; ++i) err = std::max(err, std::abs(d[i] - oracle::cauchy_pdf(g[i], s)));
  return {err < 1e-6 && t < 1.0, fmt("max abs error %.3g (< 1e-6), %.3f s (< 1 s)", err, t)};
}

std::pair<bool, std::string> stability_law() {
  bool pass = true;
  std::string detail;
  double total = 0.0;
  for (double a : {1.0, 1.5, 2.0}) {
    const oracle::StableCdf cdf(a);
    const Stopwatch w;
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(a * 100));
    std::vector<double> s(100000);
    for (auto& v : s) v = sample_stable({a, 1.0, 0.0}, rng) + sample_stable({a, 1.0, 0.0}, rng);
    total += w.seconds();
    const double scale = std::pow(2.0, 1.0 / a);
    const double d = oracle::ks(s, [&](double x) { return cdf(x / scale); });
    pass = pass && d < 0.01;
    detail += fmt("alpha %.1f KS %.4f; ", a, d);
  }
  pass = pass && total < 10.0;
  return {pass, detail + fmt("sampling %.2f s (< 10 s)", total)};
}

std::pair<bool, std::string> scaling_exponent() {
  bool pass = true;
  std::string detail;
  const Executor ex(1);
  for (double a : {1.1, 1.25, 1.5, 1.75, 2.0}) {
    exp::ScalingConfig cfg;
    cfg.alpha = a;
    cfg.realizations = 4000;
    cfg.seed = stream_seed(seed, static_cast<std::uint64_t>(a * 100));
    const auto r = exp::levy_collapse_scaling(cfg, ex);
    // At alpha = 2 every reduction is deterministic and the interval collapses to rounding width.
    const double slack = 1e-9;
    bool ok = r.slope_ci.lo - slack <= r.expected_slope && r.expected_slope <= r.slope_ci.hi + slack;
    if (a == 1.5) ok = ok && std::abs(r.slope - 1.0 / 3.0) <= 0.05;
    pass = pass && ok;
    detail += fmt("alpha %.2f slope %.4f CI [%.4f, %.4f] expected %.4f%s; ", a, r.slope, r.slope_ci.lo, r.slope_ci.hi,
                  r.expected_slope, ok ? "" : " (miss)");
  }
  return {pass, detail};
}

// Posterior mean and standard deviation of exp(-x^2 / 2) omega2(x - a) by Simpson quadrature.
std::pair<double, double> direct_posterior(const std::function<double(double)>& omega2, double a) {
  const auto w = [&](double x) { return std::exp(-x * x / 2) * omega2(x - a); };
  const int n = 20000;
  const double z = oracle::simpson(w, -14, 14, n);
  const double m = oracle::simpson([&](double x) { return x * w(x); }, -14, 14, n) / z;
  const double v = oracle::simpson([&](double x) { return (x - m) * (x - m) * w(x); }, -14, 14, n) / z;
  return {m, std::sqrt(v)};
}

std::pair<bool, std::string> gaussian_reduction() {
  // Closed-form intensities parameterized by their half width at half maximum h.
  using Shape = std::function<std::function<double(double)>(double)>;
  const std::vector<std::pair<const char*, Shape>> shapes{
      {"gaussian", [](double h) { return std::function<double(double)>([h](double u) { return std::exp(-std::log(2.0) * u * u / (h * h)); }); }},
      {"cauchy", [](double h) { return std::function<double(double)>([h](double u) { return 1.0 / (1.0 + u * u / (h * h)); }); }},
      // sin(v) / v = 1 / sqrt(2) at v = 1.3915573782515103.
      {"sinc", [](double h) {
         return std::function<double(double)>([h](double u) {
           const double v = 1.3915573782515103 * u / h;
           return v == 0.0 ? 1.0 : std::pow(std::sin(v) / v, 2);
         });
       }}};
  double worst = 0.0, elapsed = 0.0;
  for (const auto& [name, make] : shapes)
    for (double h : {20.0, 50.0, 100.0})
      for (double a : {0.0, 1.0, 3.0, 10.0}) {
        const auto omega2 = make(h);
        const Stopwatch w;
        const auto r = exp::gaussian_reduction_analytics(omega2, 1.0, a);
        elapsed += w.seconds();
        const auto [m, sd] = direct_posterior(omega2, a);
        worst = std::max({worst, std::abs(r.mu - m), std::abs(r.tau - sd) / sd});
      }
  return {worst < 1e-6 && elapsed < 1.0,
          fmt("HWHM 20/50/100 sigma, a in {0,1,3,10} sigma: worst error %.3g sigma (< 1e-6), %.3f s (< 1 s)", worst, elapsed)};
}

std::pair<bool, std::string> collapse_to_gaussian() {
  exp::CollapseConfig cfg;
  cfg.alpha = 1.0;
  cfg.steps = 100;
  cfg.realizations = 32;
  cfg.seed = seed;
  const Stopwatch w;
  const auto t = exp::collapse_to_gaussian(cfg, Executor(1));
  const double elapsed = w.seconds();
  const double k = t.abs_excess_kurtosis.back(), d = t.ks_to_gaussian.back();
  return {k < 0.05 && d < 0.01 && t.ks_to_stable_first < 0.01 && elapsed < 10.0,
          fmt("N=100: |excess kurtosis| %.4f (< 0.05), KS to Gaussian %.4f (< 0.01); N=1: KS to Cauchy %.2g (< 0.01); "
              "%.2f s (< 10 s), %zu realizations",
              k, d, t.ks_to_stable_first, elapsed, cfg.realizations)};
}

std::pair<bool, std::string> cumulants() {
  bool pass = true;
  std::string detail;
  for (double a : {1.0, 1.5}) {
    exp::CumulantConfig cfg;
    cfg.alpha = a;
    cfg.seed = stream_seed(seed, static_cast<std::uint64_t>(a * 100));
    const auto c = exp::cumulant_scaling(cfg);
    const std::size_t n = c.sizes.size();
    // c1 is a normalized sum of zero-mean terms: its spread must settle; c2 must reach -Fisher information.
    const double c1_ratio = c.rms[n - 1][0] / c.rms[n - 2][0];
    const double c2_err = std::abs(c.mean_c2.back() - c.expected_c2) / std::abs(c.expected_c2);
    const bool ok = c.slope_c3 <= -0.4 && c.slope_c4 <= -0.4 && c1_ratio > 0.8 && c1_ratio < 1.25 && c2_err < 0.05;
    pass = pass && ok;
    detail += fmt("alpha %.1f: slope c3 %.3f, c4 %.3f (<= -0.4), rms c1 ratio %.3f, c2 %.4f vs %.4f; ", a, c.slope_c3,
                  c.slope_c4, c1_ratio, c.mean_c2.back(), c.expected_c2);
  }
  return {pass, detail};
}

std::pair<bool, std::string> superposition() {
  exp::SuperpositionConfig cfg;
  cfg.detections = 2000;
  cfg.seed = seed;
  const auto r = exp::prepare_superposition(cfg, Executor(1));
  const auto& s = r.stats;
  const bool pass = s.detections >= 2000 && std::abs(s.fraction_ps_ge_one_third - 0.95) <= 0.03 &&
                    std::abs(s.mean_separation - 15.0) <= 0.5 && std::abs(s.mean_width - 1.5) <= 0.2;
  return {pass, fmt("%zu detections: P(P_s >= 1/3) %.4f (0.95 +- 0.03), separation %.3f (15 +- 0.5), width %.3f (1.5 +- 0.2)",
                    s.detections, s.fraction_ps_ge_one_third, s.mean_separation, s.mean_width)};
}

std::pair<bool, std::string> capture_numbers() {
  const double eta = capture_fraction(preset("double_gaussian"));
  const double eta_sq = capture_fraction(preset("square"));
  const double loss = (1 - eta_sq) / eta_sq;
  const double r1 = eta / (1.0 / 186.0), r2 = loss / 119.0;
  const bool pass = std::abs(r1 - 1) <= 0.3 && std::abs(r2 - 1) <= 0.3;
  return {pass, fmt("double_gaussian eta %.6f = 1/%.1f (ratio to 1/186: %.3f), square loss rate %.2f (ratio to 119: %.3f), "
                    "tolerance +-30%%",
                    eta, 1 / eta, r1, loss, r2)};
}

exp::DiffusionResult diffusion(const std::string& aperture, double efficiency, std::uint64_t index) {
  exp::DiffusionConfig cfg;
  cfg.aperture = aperture;
  cfg.efficiency = efficiency;
  cfg.trajectories = 24;
  cfg.detections = 200;
  cfg.seed = stream_seed(seed, index);
  cfg.beta.seed = stream_seed(seed, index + 100);
  return exp::anomalous_diffusion(cfg, Executor(1));
}

std::pair<bool, std::string> anomalous_diffusion() {
  const auto half = diffusion("square", 0.5, 1);
  const auto low = diffusion("square", 0.17, 2);
  const auto control = diffusion("gaussian_control", 0.5, 3);
  const auto overlaps = [](const exp::BetaEstimate& b, double c, double e) { return b.ci.lo <= c + e && c - e <= b.ci.hi; };
  const auto above = [](const exp::BetaEstimate& b) { return (b.beta - 0.5) / b.standard_error; };
  const bool ok_half = overlaps(half.beta, 0.69, 0.16) && above(half.beta) >= 2;
  const bool ok_low = overlaps(low.beta, 0.60, 0.07) && above(low.beta) >= 2;
  const bool ok_control = std::abs(control.beta.beta - 0.5) <= 0.05;
  const auto line = [&](const char* name, const exp::DiffusionResult& r) {
    return fmt("%s beta %.4f CI [%.4f, %.4f] (%.1f se above 1/2, %.2f losses per detection); ", name, r.beta.beta,
               r.beta.ci.lo, r.beta.ci.hi, above(r.beta), r.mean_losses);
  };
  return {ok_half && ok_low && ok_control,
          line("square 50%", half) + line("square 17%", low) + line("gaussian control 50%", control) +
              "targets: CI overlaps 0.69+-0.16 and 0.60+-0.07 with >= 2 se above 1/2, control within 0.5+-0.05"};
}

std::pair<bool, std::string> estimator_calibration() {
  bool pass = true;
  std::string detail;
  for (const auto& [a, want] : {std::pair{2.0, 0.5}, std::pair{1.5, 2.0 / 3.0}, std::pair{1.0, 1.0}}) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(a * 100));
    std::vector<double> x(10000);
    for (auto& v : x) v = sample_stable({a, 1.0, 0.0}, rng);
    exp::BetaOptions opts;
    opts.seed = seed;
    const auto b = exp::beta_estimator(x, opts);
    const bool ok = std::abs(b.beta - want) <= 0.03;
    pass = pass && ok;
    detail += fmt("alpha %.1f beta %.4f (%.4f +- 0.03); ", a, b.beta, want);
  }
  return {pass, detail};
}

WaveFunction random_state(const UniformGrid& g, Rng& rng) {
  std::vector<cplx> a(g.size, cplx{0.0, 0.0});
  for (int c = 0; c < 3; ++c) {
    const auto part = WaveFunction::gaussian(g, rng.uniform(-4, 4), rng.uniform(0.3, 2), rng.uniform(-2, 2));
    const cplx w = std::polar(rng.uniform(0.2, 1.0), rng.uniform(0, 2 * pi));
    for (std::size_t i = 0; i < g.size; ++i) a[i] += w * part[i];
  }
  return WaveFunction(g, std::move(a));
}

cplx overlap(const WaveFunction& a, const WaveFunction& b) {
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().step;
}

std::pair<bool, std::string> structural() {
  std::string detail;
  bool pass = true;
  Rng rng = Rng::stream(seed, 11);

  // Normalization after collapse and evolution.
  const HarmonicTrap trap{4.0};
  const auto g = trap.matched_grid(4096);
  const PhotonEmitter em(preset("square"), g, 64.0);
  double norm_err = 0.0;
  auto psi = random_state(g, rng);
  for (int i = 0; i < 5; ++i) {
    psi = em.emit(psi, rng).posterior;
    norm_err = std::max(norm_err, std::abs(psi.norm2() - 1));
    psi = quarter_period(psi, trap).state;
    norm_err = std::max(norm_err, std::abs(psi.norm2() - 1));
  }
  pass = pass && norm_err < 1e-10;
  detail += fmt("norm error %.2g (< 1e-10); ", norm_err);

  // Unitarity as preservation of overlaps, and the order-4 identity.
  const auto u = random_state(g, rng), v = random_state(g, rng);
  const double unit_err = std::abs(overlap(quarter_period(u, trap).state, quarter_period(v, trap).state) - overlap(u, v));
  auto w = u;
  for (int i = 0; i < 4; ++i) w = quarter_period(w, trap).state;
  const double order4_err = 1 - fidelity(w, u);
  pass = pass && unit_err < 1e-9 && order4_err < 1e-9;
  detail += fmt("quarter period overlap error %.2g, order-4 infidelity %.2g (< 1e-9); ", unit_err, order4_err);

  // Wigner P marginal over one full period.
  const double dz = 0.05;
  const auto gw = UniformGrid::centered(1024, dz);
  const auto sw = random_state(gw, rng);
  const UniformGrid xg = UniformGrid::centered(21, 0.25);
  const std::size_t m = 256;
  const UniformGrid pg{-pi / (2 * dz), pi / (dz * static_cast<double>(m)), m};
  const auto wig = wigner(sw, xg, pg);
  const auto rho = sw.density();
  double marg_err = 0.0;
  for (std::size_t ix = 0; ix < xg.size; ++ix) {
    double s = 0.0;
    for (std::size_t ip = 0; ip < m; ++ip) s += wig.at(ix, ip) * pg.step;
    marg_err = std::max(marg_err, std::abs(s - rho[*gw.index_of(xg[ix])]));
  }
  pass = pass && marg_err < 1e-6;
  detail += fmt("Wigner marginal error %.2g (< 1e-6); ", marg_err);

  // Detection frequency against eta for five random states.
  const auto gs = UniformGrid::centered(1024, 1.0 / 32);
  const PhotonEmitter es(preset("square"), gs, 48.0);
  const double eta = es.capture_fraction();
  double worst_z = 0.0, worst_p = 0.0;
  const int n = 20000;
  for (int k = 0; k < 5; ++k) {
    const auto st = random_state(gs, rng);
    worst_p = std::max(worst_p, std::abs(es.detection_probability(st) / eta - 1));
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += es.emit(st, rng).detected ? 1 : 0;
    const double se = std::sqrt(eta * (1 - eta) / n);
    worst_z = std::max(worst_z, std::abs(hits / static_cast<double>(n) - eta) / se);
  }
  pass = pass && worst_z <= 3.0 && worst_p < 1e-3;
  detail += fmt("detection frequency within %.2f se of eta (<= 3), state-computed probability within %.2g of eta; ",
                worst_z, worst_p);

  // Kernel -> aperture -> kernel round trip for targets whose spectrum lies inside the capture
  // region, as relative L2 error after removing the global complex scale; and |chi|^2 <= f.
  const auto z = default_kernel_grid();
  const auto gaussians = [&](std::vector<std::pair<double, double>> parts) {
    std::vector<cplx> a(z.size);
    for (std::size_t i = 0; i < z.size; ++i)
      for (const auto& [c, sd] : parts) a[i] += std::exp(-(z[i] - c) * (z[i] - c) / (4 * sd * sd));
    return a;
  };
  struct Target {
    std::vector<cplx> a;
    double capture;
  };
  const std::vector<Target> targets{{gaussians({{0.0, 1.5}}), 0.5},
                                    {gaussians({{5.0, 1.5}}), 0.5},
                                    {gaussians({{-7.5, 1.5}, {7.5, 1.5}}), 1.0},
                                    {gaussians({{0.0, 32 / std::sqrt(12.0)}}), 0.25}};
  double trip = 0.0, excess = 0.0;
  for (const auto& t : targets) {
    DesignOptions opts;
    opts.capture_lo = -t.capture;
    opts.capture_hi = t.capture;
    const auto d = design_aperture(CollapseKernel{z, t.a, KernelKind::detected, 0.0}, opts);
    const auto real = collapse_kernel(d.aperture, z).values;
    cplx num{0.0, 0.0};
    double den = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < z.size; ++i) {
      num += std::conj(real[i]) * t.a[i];
      den += std::norm(real[i]);
      ref += std::norm(t.a[i]);
    }
    const cplx scale = num / den;
    double err = 0.0;
    for (std::size_t i = 0; i < z.size; ++i) err += std::norm(scale * real[i] - t.a[i]);
    trip = std::max(trip, std::sqrt(err / ref));
    const auto chi = d.aperture.chi();
    for (std::size_t i = 0; i < chi.size(); ++i)
      excess = std::max(excess, std::norm(chi[i]) - emission_pattern(d.aperture.xi_grid[i]));
  }
  for (const auto& name : preset_names()) {
    const auto ap = preset(name);
    const auto chi = ap.chi();
    for (std::size_t i = 0; i < chi.size(); ++i)
      excess = std::max(excess, std::norm(chi[i]) - emission_pattern(ap.xi_grid[i]));
  }
  pass = pass && trip < 1e-3 && excess <= 1e-12;
  detail += fmt("design round trip relative L2 %.2g (< 1e-3), max |chi|^2 - f %.2g (<= 0)", trip, excess);
  return {pass, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::pair<bool, std::string> determinism() {
  const std::vector<std::pair<std::string, std::string>> configs{
      {"levy_scaling", "alphas = 1.5\nrealizations = 300\nbootstrap_resamples = 100\n"},
      {"superposition", "grid_points = 8192\ndetections = 40\nbootstrap_resamples = 100\n"},
      {"anomalous_diffusion",
       "trap_length_in_wavelengths = 4\ngrid_points = 4096\nkernel_half_width_in_wavelengths = 64\ntrajectories = 4\n"
       "detections = 60\nbootstrap_resamples = 100\n"},
      {"collapse_to_gaussian", "steps = 20\nrealizations = 8\ncumulant_realizations = 50\nbootstrap_resamples = 100\n"}};
  const auto root = fs::temp_directory_path() / "qim_acceptance_determinism";
  bool pass = true;
  std::string detail;
  for (const auto& [name, keys] : configs) {
    std::string files[2];
    for (int k = 0; k < 2; ++k) {
      std::istringstream is("experiment = " + name + "\nseed = 1\n" + keys);
      auto cfg = harness::RunConfig::parse(is);
      cfg.set_workers(k == 0 ? 1 : 8);
      cfg.set_output_dir(root / (name + (k == 0 ? "_w1" : "_w8")));
      fs::remove_all(cfg.output_dir());
      const auto r = harness::run(cfg);
      for (const auto& f : r.outputs) files[k] += f + "\n" + slurp(r.run_dir / f);
    }
    const bool same = files[0] == files[1];
    pass = pass && same;
    detail += name + (same ? ": identical; " : ": DIFFERENT; ");
  }
  fs::remove_all(root);
  return {pass, detail + "workers 1 vs 8, all outputs including summary.json"};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  criterion(1, "Cauchy density", cauchy_density);
  criterion(2, "stability law", stability_law);
  criterion(3, "scaling exponent", scaling_exponent);
  criterion(4, "Gaussian reduction", gaussian_reduction);
  criterion(5, "collapse to Gaussian", collapse_to_gaussian);
  criterion(6, "cumulant scaling", cumulants);
  criterion(7, "superposition preparation", superposition);
  criterion(8, "capture numbers", capture_numbers);
  criterion(9, "anomalous diffusion", anomalous_diffusion);
  criterion(10, "estimator calibration", estimator_calibration);
  criterion(11, "structural invariants", structural);
  criterion(12, "determinism", determinism);
  std::printf("%d of %zu criteria failed\n", failures, selected.empty() ? std::size_t{12} : selected.size());
  return failures == 0 ? 0 : 1;
}
