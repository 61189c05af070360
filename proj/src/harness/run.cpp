#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "qim/errors.hpp"
#include "qim/executor.hpp"
#include "qim/experiments/abs_position.hpp"
#include "qim/experiments/anomalous_diffusion.hpp"
#include "qim/experiments/chained_record.hpp"
#include "qim/experiments/collapse_to_gaussian.hpp"
#include "qim/experiments/gaussian_reduction.hpp"
#include "qim/experiments/levy_scaling.hpp"
#include "qim/experiments/superposition.hpp"
#include "qim/harness.hpp"
#include "qim/levy.hpp"
#include "qim/optics.hpp"
#include "qim/quantum.hpp"
#include "qim/stats.hpp"

namespace qim::harness {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
constexpr double pi = std::numbers::pi;

// Stream indices reserved for summary bootstraps, far from the experiments' trajectory streams.
constexpr std::uint64_t bootstrap_stream = 0xb007'0000'0000ULL;

class Context {
 public:
  Context(const RunConfig& cfg, fs::path dir) : cfg(cfg), dir(std::move(dir)), executor(cfg.workers()) {}

  const RunConfig& cfg;
  fs::path dir;
  Executor executor;
  json summary = json::object();
  std::vector<std::string> outputs;

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) fail(ErrorCategory::resource, "cannot write " + (dir / name).string());
    os.precision(17);
    outputs.push_back(name);
    return os;
  }

  std::size_t resamples() const { return static_cast<std::size_t>(cfg.integer("bootstrap_resamples")); }

  /// Bootstrap summary of a statistic; each call uses its own stream so that results do not depend
  /// on the order of the calls.
  json interval(std::span<const double> data, const std::function<double(std::span<const double>)>& statistic) {
    Rng rng = Rng::stream(cfg.seed(), bootstrap_stream + calls_++);
    const auto b = stats::bootstrap(data, statistic, resamples(), rng);
    return {{"estimate", b.estimate}, {"standard_error", b.standard_error}, {"ci95", {b.ci.lo, b.ci.hi}}};
  }
  json mean_interval(std::span<const double> data) {
    return interval(data, [](std::span<const double> x) { return stats::mean(x); });
  }

 private:
  std::uint64_t calls_ = 0;
};

std::uint64_t sub_seed(const Context& c, std::uint64_t index) { return stream_seed(c.cfg.seed(), index); }

std::vector<std::size_t> sizes(const std::vector<long long>& v, const char* what) {
  std::vector<std::size_t> out;
  for (auto x : v) {
    require(x >= 1, std::string(what) + " must be positive", ErrorCategory::config_parse);
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

std::size_t count(const Context& c, const std::string& key) {
  const auto v = c.cfg.integer(key);
  require(v >= 1, key + " must be positive", ErrorCategory::config_parse);
  return static_cast<std::size_t>(v);
}

// Quantile of the standard stable law by bisection on its CDF.
double stable_quantile(const StablePdf& pdf, double p) {
  double lo = -1e6, hi = 1e6;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (pdf.cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void levy_scaling(Context& c) {
  auto out = c.open("scaling.csv");
  auto reps = c.open("reductions.csv");
  out << "alpha,rung,width,mean_reduction,reduction_se\n";
  reps << "alpha,rung,realization,reduction\n";
  json per_alpha = json::array();
  const auto alphas = c.cfg.reals("alphas");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    exp::ScalingConfig sc;
    sc.alpha = alphas[i];
    sc.rungs = sizes(c.cfg.integers("rungs"), "rungs");
    sc.realizations = count(c, "realizations");
    sc.target_reduction = c.cfg.real("target_reduction_in_initial_variance");
    sc.grid_points = count(c, "grid_points");
    sc.grid_half_width = c.cfg.real("grid_half_width_in_initial_sd");
    sc.bootstrap_resamples = c.resamples();
    sc.seed = sub_seed(c, i);
    const auto r = exp::levy_collapse_scaling(sc, c.executor);
    json rungs = json::array();
    for (std::size_t k = 0; k < r.rungs.size(); ++k) {
      out << r.alpha << "," << r.rungs[k] << "," << r.widths[k] << "," << r.mean_reduction[k] << ","
          << r.reduction_se[k] << "\n";
      for (std::size_t j = 0; j < r.reductions[k].size(); ++j)
        reps << r.alpha << "," << r.rungs[k] << "," << j << "," << r.reductions[k][j] << "\n";
      rungs.push_back({{"measurements", r.rungs[k]},
                       {"mean_reduction", r.mean_reduction[k]},
                       {"standard_error", r.reduction_se[k]}});
    }
    json entry{{"alpha", r.alpha},
               {"horizon", r.horizon},
               {"slope", {{"estimate", r.slope}, {"standard_error", r.slope_se}, {"ci95", {r.slope_ci.lo, r.slope_ci.hi}}}},
               {"expected_slope", r.expected_slope},
               {"expected_in_ci", r.slope_ci.contains(r.expected_slope)},
               {"rungs", rungs}};
    if (c.cfg.flag("deterministic")) {
      const auto d = exp::levy_collapse_scaling_deterministic(sc.alpha, sc.rungs, sc.target_reduction);
      entry["deterministic_slope"] = d.slope;
    }
    per_alpha.push_back(entry);
  }
  c.summary["alphas"] = per_alpha;
}

void superposition(Context& c) {
  exp::SuperpositionConfig sc;
  sc.aperture = c.cfg.text("aperture");
  sc.trap_length = c.cfg.real("trap_length_in_wavelengths");
  sc.grid_points = count(c, "grid_points");
  sc.grid_step = c.cfg.real("grid_step_in_wavelengths");
  sc.kernel_half_width = c.cfg.real("kernel_half_width_in_wavelengths");
  sc.detections = count(c, "detections");
  sc.seed = c.cfg.seed();
  const auto r = exp::prepare_superposition(sc, c.executor);
  const auto& st = r.stats;

  auto out = c.open("trials.csv");
  out << "trial,a,emissions,smaller_probability,separation,left_width,right_width,dominant_peaks\n";
  std::vector<double> ge, sep, width, emissions;
  for (std::size_t i = 0; i < st.records.size(); ++i) {
    const auto& t = st.records[i];
    out << i << "," << t.a << "," << t.emissions << "," << t.split.smaller_probability << "," << t.split.separation
        << "," << t.split.left_width << "," << t.split.right_width << "," << t.split.dominant_peaks << "\n";
    ge.push_back(t.split.smaller_probability >= 1.0 / 3.0 ? 1.0 : 0.0);
    sep.push_back(t.split.separation);
    width.push_back(0.5 * (t.split.left_width + t.split.right_width));
    emissions.push_back(static_cast<double>(t.emissions));
  }
  auto state = c.open("final_state.csv");
  write_state_csv(state, r.final_state);

  const double eta = st.capture_fraction;
  c.summary["detections"] = st.detections;
  c.summary["emissions"] = st.trials;
  c.summary["capture_fraction"] = eta;
  c.summary["loss_rate"] = (1.0 - eta) / eta;
  c.summary["detected_fraction"] =
      c.interval(emissions, [](std::span<const double> x) { return 1.0 / stats::mean(x); });
  c.summary["fraction_Ps_ge_one_third"] = c.mean_interval(ge);
  c.summary["packet_separation"] = c.mean_interval(sep);
  c.summary["packet_width"] = c.mean_interval(width);
}

void abs_position(Context& c) {
  exp::AbsPositionConfig ac;
  ac.grid_points = count(c, "grid_points");
  ac.grid_step = c.cfg.real("grid_step_in_wavelengths");
  ac.kernel_half_width = c.cfg.real("kernel_half_width_in_wavelengths");
  ac.packet_center = c.cfg.real("packet_center_in_wavelengths");
  ac.packet_sigma = c.cfg.real("packet_sigma_in_wavelengths");
  ac.symmetric = c.cfg.flag("symmetric");
  ac.measurements = count(c, "measurements");
  ac.trajectories = count(c, "trajectories");
  ac.seed = c.cfg.seed();
  const auto trajs = exp::abs_position_trajectories(ac, c.executor);

  auto out = c.open("trajectories.csv");
  out << "trajectory,measurement,a,mean_abs\n";
  std::vector<double> kurt, width, right;
  double parity = 0.0;
  for (std::size_t t = 0; t < trajs.size(); ++t) {
    const auto& tr = trajs[t];
    for (std::size_t n = 0; n < tr.results.size(); ++n)
      out << t << "," << n + 1 << "," << tr.results[n] << "," << tr.mean_abs[n] << "\n";
    kurt.push_back(std::max(std::abs(tr.right_kurtosis), std::abs(tr.left_kurtosis)));
    width.push_back(tr.final_width);
    right.push_back(tr.right_mass);
    parity = std::max(parity, tr.parity_error);
  }
  c.summary["trajectories"] = trajs.size();
  c.summary["max_parity_error"] = parity;
  c.summary["packet_abs_excess_kurtosis"] = c.mean_interval(kurt);
  c.summary["final_abs_z_width"] = c.mean_interval(width);
  c.summary["right_mass"] = c.mean_interval(right);
}

void gaussian_reduction(Context& c) {
  auto out = c.open("reduction.csv");
  out << "kernel,hwhm_setting,a,a_coef,b_coef,mu,tau,mu_numeric,tau_numeric,hwhm\n";
  const auto points = count(c, "grid_points");
  json per_kernel = json::object();
  for (const auto& kind : c.cfg.texts("kernels")) {
    double err_mu = 0.0, err_tau = 0.0;
    // Widths are half widths at half maximum, converted to each shape's own parameter.
    const double unit_hwhm = exp::half_width_half_max(exp::named_intensity(kind, 1.0), 1.0);
    for (double w : c.cfg.reals("kernel_hwhm_in_sigma")) {
      for (double a : c.cfg.reals("results_in_sigma")) {
        const auto r = exp::gaussian_reduction_analytics(exp::named_intensity(kind, w / unit_hwhm), 1.0, a, points);
        out << kind << "," << w << "," << a << "," << r.a_coef << "," << r.b_coef << "," << r.mu << "," << r.tau
            << "," << r.mu_numeric << "," << r.tau_numeric << "," << r.kernel_width << "\n";
        err_mu = std::max(err_mu, std::abs(r.mu - r.mu_numeric));
        err_tau = std::max(err_tau, std::abs(r.tau - r.tau_numeric));
      }
    }
    // Deterministic quadrature: no sampling error, so no interval.
    per_kernel[kind] = {{"max_mean_error_in_sigma", err_mu}, {"max_sd_error_in_sigma", err_tau}};
  }
  c.summary["kernels"] = per_kernel;
}

void collapse_to_gaussian(Context& c) {
  auto trace = c.open("trace.csv");
  auto fin = c.open("final.csv");
  trace << "alpha,n,mean_abs_excess_kurtosis,mean_ks_to_gaussian\n";
  fin << "alpha,realization,excess_kurtosis,ks_to_gaussian\n";
  json per_alpha = json::array();
  const auto alphas = c.cfg.reals("alphas");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    exp::CollapseConfig cc;
    cc.alpha = alphas[i];
    cc.steps = count(c, "steps");
    cc.realizations = count(c, "realizations");
    cc.half_width = c.cfg.real("grid_half_width_in_sigma");
    cc.grid_step = c.cfg.real("grid_step_in_sigma");
    cc.seed = sub_seed(c, i);
    const auto t = exp::collapse_to_gaussian(cc, c.executor);
    for (std::size_t n = 0; n < t.abs_excess_kurtosis.size(); ++n)
      trace << t.alpha << "," << n + 1 << "," << t.abs_excess_kurtosis[n] << "," << t.ks_to_gaussian[n] << "\n";
    std::vector<double> abs_k;
    for (std::size_t r = 0; r < t.final_excess_kurtosis.size(); ++r) {
      fin << t.alpha << "," << r << "," << t.final_excess_kurtosis[r] << "," << t.final_ks[r] << "\n";
      abs_k.push_back(std::abs(t.final_excess_kurtosis[r]));
    }
    per_alpha.push_back({{"alpha", t.alpha},
                         {"steps", cc.steps},
                         {"final_abs_excess_kurtosis", c.mean_interval(abs_k)},
                         {"final_ks_to_gaussian", c.mean_interval(t.final_ks)},
                         {"first_ks_to_stable", t.ks_to_stable_first}});
  }
  c.summary["collapse"] = per_alpha;

  auto cum = c.open("cumulants.csv");
  cum << "alpha,factors,rms_c1,rms_c2,rms_c3,rms_c4,mean_c2\n";
  json per_cum = json::array();
  const auto calphas = c.cfg.reals("cumulant_alphas");
  for (std::size_t i = 0; i < calphas.size(); ++i) {
    exp::CumulantConfig kc;
    kc.alpha = calphas[i];
    kc.sizes = sizes(c.cfg.integers("cumulant_sizes"), "cumulant_sizes");
    kc.realizations = count(c, "cumulant_realizations");
    kc.seed = sub_seed(c, 1000 + i);
    const auto s = exp::cumulant_scaling(kc);
    for (std::size_t k = 0; k < s.sizes.size(); ++k)
      cum << s.alpha << "," << s.sizes[k] << "," << s.rms[k][0] << "," << s.rms[k][1] << "," << s.rms[k][2] << ","
          << s.rms[k][3] << "," << s.mean_c2[k] << "\n";
    per_cum.push_back({{"alpha", s.alpha},
                       {"slope_rms_c3", s.slope_c3},
                       {"slope_rms_c4", s.slope_c4},
                       {"mean_c2_largest", s.mean_c2.back()},
                       {"expected_c2", s.expected_c2}});
  }
  c.summary["cumulants"] = per_cum;
}

void chained_record(Context& c) {
  auto rec = c.open("record.csv");
  auto mac = c.open("macro.csv");
  rec << "alpha,t,increment\n";
  mac << "alpha,interval,macro_increment\n";
  const double mean_x = c.cfg.real("mean_x_in_record_units");
  const double interval = c.cfg.real("macro_interval_in_time");
  json per_alpha = json::array();
  const auto alphas = c.cfg.reals("alphas");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    SubordinatedConfig sc{alphas[i], c.cfg.real("jump_rate_per_time"), c.cfg.real("gamma_in_record_units"),
                          c.cfg.real("horizon_in_time")};
    Rng rng = Rng::stream(c.cfg.seed(), i);
    const auto r = exp::chained_measurement_record(sc, [mean_x](double) { return mean_x; }, rng, interval);
    // The event record is long; the first ten macro intervals are kept for plotting.
    for (std::size_t k = 0; k < r.t.size() && r.t[k] < 10.0 * interval; ++k)
      rec << sc.alpha << "," << r.t[k] << "," << r.increment[k] << "\n";
    for (std::size_t k = 0; k < r.macro_increment.size(); ++k) mac << sc.alpha << "," << k << "," << r.macro_increment[k] << "\n";
    const StablePdf pdf(sc.alpha);
    const double scale = sc.gamma * std::pow(sc.jump_rate * interval, 1.0 / sc.alpha);
    const double expected_iqr = scale * (stable_quantile(pdf, 0.75) - stable_quantile(pdf, 0.25));
    json entry{{"alpha", sc.alpha},
               {"events", r.t.size()},
               {"macro_intervals", r.macro_increment.size()},
               {"macro_iqr", c.interval(r.macro_increment, [](std::span<const double> x) { return stats::iqr(x); })},
               {"expected_macro_iqr", expected_iqr}};
    if (mean_x == 0.0) entry["ks_to_stable"] = exp::chained_ks_to_stable(r, sc);
    per_alpha.push_back(entry);
  }
  c.summary["alphas"] = per_alpha;
}

void anomalous_diffusion(Context& c) {
  exp::DiffusionConfig dc;
  dc.aperture = c.cfg.text("aperture");
  dc.trap_length = c.cfg.real("trap_length_in_wavelengths");
  dc.grid_points = count(c, "grid_points");
  dc.kernel_half_width = c.cfg.real("kernel_half_width_in_wavelengths");
  dc.trajectories = count(c, "trajectories");
  dc.detections = count(c, "detections");
  dc.efficiency = c.cfg.real("efficiency");
  dc.post_select = exp::parse_post_select(c.cfg.text("post_select"));
  dc.loss_unraveling = exp::parse_loss_unraveling(c.cfg.text("loss_unraveling"));
  dc.seed = c.cfg.seed();
  dc.beta.pairings = count(c, "beta_pairings");
  dc.beta.resamples = c.resamples();
  dc.beta.seed = stream_seed(c.cfg.seed(), bootstrap_stream - 1);
  const auto r = exp::anomalous_diffusion(dc, c.executor);

  auto out = c.open("records.csv");
  out << "trajectory,measurement,delta_x,losses,post_selected,mean_x\n";
  double edge = 0.0;
  json aborted = json::array();
  for (std::size_t t = 0; t < r.records.size(); ++t) {
    const auto& rec = r.records[t];
    for (std::size_t n = 0; n < rec.delta_x.size(); ++n)
      out << t << "," << n + 1 << "," << rec.delta_x[n] << "," << rec.losses[n] << "," << (rec.post_selected[n] ? 1 : 0)
          << "," << rec.mean_x[n] << "\n";
    edge = std::max(edge, rec.max_edge_mass);
    if (rec.aborted) aborted.push_back({{"trajectory", t}, {"reason", rec.abort_reason}});
  }
  json growth = json::array();
  for (const auto& g : r.variance_growth) growth.push_back({{"samples", g.samples}, {"variance", g.variance}});
  const auto& b = r.beta;
  c.summary["beta"] = {{"estimate", b.beta}, {"standard_error", b.standard_error}, {"ci95", {b.ci.lo, b.ci.hi}}};
  c.summary["beta_minus_half_in_standard_errors"] = (b.beta - 0.5) / b.standard_error;
  c.summary["sigma1"] = b.sigma1;
  c.summary["sigma2"] = b.sigma2;
  c.summary["samples"] = r.samples;
  c.summary["mean_losses_per_detection"] = r.mean_losses;
  c.summary["aperture_capture_fraction"] = r.capture_fraction;
  c.summary["max_edge_mass"] = edge;
  c.summary["aborted_trajectories"] = aborted;
  c.summary["variance_growth"] = growth;
}

void levy_paths(Context& c) {
  const double horizon = c.cfg.real("horizon_in_time");
  const auto steps = count(c, "steps");
  const auto ensemble = count(c, "ensemble");
  require(steps >= 100, "levy_paths: need at least 100 steps", ErrorCategory::config_parse);
  // Checkpoints for the width fit: ten logarithmically spaced step indices spanning two decades.
  std::vector<std::size_t> marks;
  for (int j = 0; j < 10; ++j) {
    const auto m = static_cast<std::size_t>(std::llround(static_cast<double>(steps) * std::pow(10.0, -2.0 + 2.0 * j / 9.0)));
    if (marks.empty() || m > marks.back()) marks.push_back(std::max<std::size_t>(1, m));
  }
  auto paths = c.open("paths.csv");
  auto widths = c.open("widths.csv");
  paths << "alpha,t,value\n";
  widths << "alpha,t,iqr\n";
  json per_alpha = json::array();
  const auto alphas = c.cfg.reals("alphas");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const StableParams p{alphas[i], c.cfg.real("sigma"), 0.0};
    p.validate();
    const auto shown = stable_path(p, PathConfig{horizon, steps, sub_seed(c, i)});
    for (std::size_t k = 0; k < shown.t.size(); ++k) paths << p.alpha << "," << shown.t[k] << "," << shown.value[k] << "\n";

    std::vector<std::vector<double>> at(ensemble);
    c.executor.parallel_for(ensemble, [&](std::size_t e) {
      const auto s = stable_path(p, PathConfig{horizon, steps, stream_seed(sub_seed(c, i), e + 1)});
      for (auto m : marks) at[e].push_back(s.value[m]);
    });
    std::vector<double> logt;
    for (auto m : marks) logt.push_back(std::log(shown.t[m]));
    const auto slope_of = [&](std::span<const double> idx) {
      std::vector<double> logw;
      std::vector<double> col(idx.size());
      for (std::size_t k = 0; k < marks.size(); ++k) {
        for (std::size_t j = 0; j < idx.size(); ++j) col[j] = at[static_cast<std::size_t>(idx[j])][k];
        logw.push_back(std::log(stats::iqr(col)));
      }
      return stats::linear_fit(logt, logw).slope;
    };
    std::vector<double> all(ensemble);
    std::iota(all.begin(), all.end(), 0.0);
    std::vector<double> col(ensemble);
    for (std::size_t k = 0; k < marks.size(); ++k) {
      for (std::size_t e = 0; e < ensemble; ++e) col[e] = at[e][k];
      widths << p.alpha << "," << shown.t[marks[k]] << "," << stats::iqr(col) << "\n";
    }
    per_alpha.push_back({{"alpha", p.alpha}, {"iqr_slope", c.interval(all, slope_of)}, {"expected_slope", 1.0 / p.alpha}});
  }
  c.summary["alphas"] = per_alpha;
}

void apertures(Context& c) {
  json per = json::object();
  for (const auto& name : c.cfg.texts("presets")) {
    const auto ap = preset(name);
    auto a = c.open("aperture_" + name + ".csv");
    write_aperture_csv(a, ap);
    const auto kernel = collapse_kernel(ap, default_kernel_grid());
    auto k = c.open("kernel_" + name + ".csv");
    write_kernel_csv(k, kernel);
    const double eta = capture_fraction(ap);
    // Exact quadratures: no sampling error, so no interval.
    per[name] = {{"capture_fraction", eta},
                 {"loss_rate", eta > 0.0 ? (1.0 - eta) / eta : std::numeric_limits<double>::infinity()},
                 {"mirrors", ap.mirrors},
                 {"delta_phi_in_degrees", ap.delta_phi * 180.0 / pi},
                 {"capture_region_in_xi", {ap.capture_lo, ap.capture_hi}},
                 {"kernel_tail_mass", kernel.tail_mass}};
  }
  c.summary["presets"] = per;
}

void cauchy_wigner(Context& c) {
  const double s = c.cfg.real("cauchy_sigma_in_position_units");
  const double dz = c.cfg.real("grid_step_in_position_units");
  const auto grid = UniformGrid::centered(count(c, "grid_points"), dz);
  std::vector<cplx> amp(grid.size);
  for (std::size_t i = 0; i < grid.size; ++i) amp[i] = std::sqrt(s / (pi * (grid[i] * grid[i] + s * s)));
  const WaveFunction psi(grid, std::move(amp));

  const double xw = c.cfg.real("x_half_width_in_position_units");
  const auto xn = count(c, "x_points");
  require(xn >= 2, "cauchy_wigner: need two X points", ErrorCategory::config_parse);
  const UniformGrid xg{-xw, 2.0 * xw / static_cast<double>(xn - 1), xn};
  require(grid.index_of(xg.front()).has_value() && grid.index_of(xg.back()).has_value() &&
              std::abs(xg.step / dz - std::round(xg.step / dz)) < 1e-9,
          "cauchy_wigner: X points must lie on the state lattice", ErrorCategory::config_parse);
  const auto pg = UniformGrid::closed(-c.cfg.real("p_half_width_in_momentum_units"),
                                      c.cfg.real("p_half_width_in_momentum_units"), count(c, "p_points"));
  const auto w = wigner(psi, xg, pg);
  auto out = c.open("wigner.csv");
  write_wigner_csv(out, w);
  auto st = c.open("state.csv");
  write_state_csv(st, psi);

  const auto [mn, mx] = std::minmax_element(w.values.begin(), w.values.end());
  double neg = 0.0, total = 0.0;
  for (double v : w.values) {
    total += v;
    if (v < 0.0) neg -= v;
  }
  const double cell = xg.step * pg.step;
  // Deterministic transform: no sampling error, so no interval.
  c.summary["min_w"] = *mn;
  c.summary["max_w"] = *mx;
  c.summary["volume_in_window"] = total * cell;
  c.summary["negative_volume_in_window"] = neg * cell;
}

using Driver = void (*)(Context&);

Driver driver(const std::string& name) {
  static const std::map<std::string, Driver> drivers{
      {"levy_scaling", levy_scaling},
      {"superposition", superposition},
      {"abs_position", abs_position},
      {"gaussian_reduction", gaussian_reduction},
      {"collapse_to_gaussian", collapse_to_gaussian},
      {"chained_record", chained_record},
      {"anomalous_diffusion", anomalous_diffusion},
      {"levy_paths", levy_paths},
      {"apertures", apertures},
      {"cauchy_wigner", cauchy_wigner},
  };
  const auto it = drivers.find(name);
  if (it == drivers.end()) fail(ErrorCategory::unknown_experiment, "no driver for experiment " + name);
  return it->second;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) fail(ErrorCategory::resource, "cannot write " + path.string());
  os << j.dump(2) << "\n";
  if (!os) fail(ErrorCategory::resource, "write failed: " + path.string());
}

}  // namespace

RunOutcome run(const RunConfig& config) {
  const auto drive = driver(config.experiment());
  const fs::path dir = config.output_dir();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCategory::resource, "cannot create " + dir.string() + ": " + ec.message());
  // A stale manifest would vouch for outputs that are about to be replaced.
  fs::remove(dir / "manifest.json", ec);

  const auto started = utc_now();
  Context c(config, dir);
  c.summary["experiment"] = config.experiment();
  c.summary["seed"] = config.seed();
  drive(c);
  write_json(dir / "summary.json", c.summary);
  c.outputs.push_back("summary.json");

  json config_json = json::object();
  config_json["experiment"] = config.experiment();
  config_json["seed"] = config.seed();
  config_json["workers"] = config.workers();
  config_json["output_dir"] = config.output_dir().string();
  for (const auto& [k, v] : config.values()) config_json[k] = v;
  json outputs = json::array();
  for (const auto& name : c.outputs)
    outputs.push_back({{"file", name}, {"bytes", fs::file_size(dir / name)}, {"fnv1a64", fnv1a_file(dir / name)}});
  const json manifest{{"tool", "qimaging"},
                      {"version", QIM_VERSION},
                      {"config", config_json},
                      {"config_text", config.resolved_text()},
                      {"started_utc", started},
                      {"finished_utc", utc_now()},
                      {"outputs", outputs}};
  write_json(dir / "manifest.json", manifest);
  return {dir, c.outputs};
}

}  // namespace qim::harness
