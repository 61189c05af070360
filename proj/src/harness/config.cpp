#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "qim/errors.hpp"
#include "qim/harness.hpp"

namespace qim::harness {
namespace {

using enum ValueType;

std::vector<ExperimentSpec> build_registry() {
  return {
      {"levy_scaling",
       "uncertainty reduction against measurement rate for stable measurement noise",
       {
           {"alphas", real_list, "1.1,1.25,1.5,1.75,2", "stability indices"},
           {"rungs", integer_list, "8,16,32,64", "measurements per horizon, doubling"},
           {"realizations", integer, "4000", "Monte Carlo realizations per rung"},
           {"target_reduction_in_initial_variance", real, "0.001", "expected reduction at the finest rung"},
           {"grid_points", integer, "512", "density grid points"},
           {"grid_half_width_in_initial_sd", real, "8", "density grid half width"},
           {"deterministic", flag, "true", "also run the quadrature variant"},
           {"bootstrap_resamples", integer, "1000", "bootstrap resamples"},
       }},
      {"superposition",
       "two-packet preparation by a double-Gaussian image of a trapped atom",
       {
           {"aperture", text, "double_gaussian", "aperture preset"},
           {"trap_length_in_wavelengths", real, "60", "ground-state width x0"},
           {"grid_points", integer, "32768", "state grid points"},
           {"grid_step_in_wavelengths", real, "0.03125", "state grid step"},
           {"kernel_half_width_in_wavelengths", real, "64", "kernel support half width"},
           {"detections", integer, "2000", "detected-photon trials"},
           {"bootstrap_resamples", integer, "1000", "bootstrap resamples"},
       }},
      {"abs_position",
       "repeated |z| measurements by superposing an image with its mirror image",
       {
           {"grid_points", integer, "8192", "state grid points"},
           {"grid_step_in_wavelengths", real, "0.00390625", "state grid step"},
           {"kernel_half_width_in_wavelengths", real, "64", "kernel support half width"},
           {"packet_center_in_wavelengths", real, "8", "initial packet centre"},
           {"packet_sigma_in_wavelengths", real, "1", "initial packet standard deviation"},
           {"symmetric", flag, "true", "start from a +-centre superposition"},
           {"measurements", integer, "20", "detections per trajectory"},
           {"trajectories", integer, "8", "trajectories"},
           {"bootstrap_resamples", integer, "1000", "bootstrap resamples"},
       }},
      {"gaussian_reduction",
       "quadratic-expansion prediction of a Gaussian posterior under a broad kernel",
       {
           {"kernels", text_list, "gaussian,cauchy,sinc", "kernel intensity shapes"},
           {"kernel_hwhm_in_sigma", real_list, "20,50,100", "kernel half widths at half maximum"},
           {"results_in_sigma", real_list, "0,1,3,10", "measurement results a"},
           {"grid_points", integer, "4097", "direct multiplication grid points"},
       }},
      {"collapse_to_gaussian",
       "repeated stable-density measurements on a flat prior",
       {
           {"alphas", real_list, "1,2", "stability indices"},
           {"steps", integer, "100", "measurements per realization"},
           {"realizations", integer, "32", "realizations"},
           {"grid_half_width_in_sigma", real, "200", "position grid half width"},
           {"grid_step_in_sigma", real, "0.01", "position grid step"},
           {"cumulant_alphas", real_list, "1,1.5", "stability indices of the cumulant check"},
           {"cumulant_sizes", integer_list, "10,30,100,300,1000,3000", "numbers of factors"},
           {"cumulant_realizations", integer, "400", "realizations per size"},
           {"bootstrap_resamples", integer, "1000", "bootstrap resamples"},
       }},
      {"chained_record",
       "measurement record driven by a Poisson-subordinated stable process",
       {
           {"alphas", real_list, "1,1.5,2", "stability indices"},
           {"jump_rate_per_time", real, "100", "Poisson event rate"},
           {"gamma_in_record_units", real, "0.01", "jump scale"},
           {"horizon_in_time", real, "10000", "record length"},
           {"macro_interval_in_time", real, "1", "integration interval of the record"},
           {"mean_x_in_record_units", real, "0", "constant <X>"},
           {"bootstrap_resamples", integer, "1000", "bootstrap resamples"},
       }},
      {"anomalous_diffusion",
       "square-profile imaging with quarter-period evolution between detections",
       {
           {"aperture", text, "square", "aperture preset"},
           {"trap_length_in_wavelengths", real, "16", "ground-state width x0"},
           {"grid_points", integer, "32768", "matched state grid points"},
           {"kernel_half_width_in_wavelengths", real, "256", "kernel support half width"},
           {"trajectories", integer, "24", "trajectories"},
           {"detections", integer, "200", "detections per trajectory"},
           {"efficiency", real, "0.5", "probability that an emission is detected"},
           {"post_select", text, "none", "none | first_emission"},
           {"loss_unraveling", text, "recoil_kick", "recoil_kick | image_position"},
           {"beta_pairings", integer, "16", "random pairings averaged in sigma2"},
           {"bootstrap_resamples", integer, "1000", "bootstrap resamples"},
       }},
      {"levy_paths",
       "sample paths and width scaling of stable processes",
       {
           {"alphas", real_list, "2,1", "stability indices"},
           {"sigma", real, "1", "width per unit time"},
           {"horizon_in_time", real, "10", "path length"},
           {"steps", integer, "1000", "increments per path"},
           {"ensemble", integer, "10000", "paths for the width scaling fit"},
           {"bootstrap_resamples", integer, "200", "bootstrap resamples"},
       }},
      {"apertures",
       "aperture presets, their kernels and capture fractions",
       {
           {"presets", text_list, "double_gaussian,cauchy,square,full", "aperture presets"},
       }},
      {"cauchy_wigner",
       "Wigner function of a state with a Cauchy position density",
       {
           {"cauchy_sigma_in_position_units", real, "0.3", "Cauchy width"},
           {"grid_points", integer, "8192", "state grid points"},
           {"grid_step_in_position_units", real, "0.01", "state grid step"},
           {"x_half_width_in_position_units", real, "1.5", "Wigner X range"},
           {"x_points", integer, "151", "Wigner X points"},
           {"p_half_width_in_momentum_units", real, "8", "Wigner P range"},
           {"p_points", integer, "161", "Wigner P points"},
       }},
  };
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

bool parse_integer(const std::string& s, long long& v) {
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  return r.ec == std::errc{} && r.ptr == end;
}

bool parse_real(const std::string& s, double& v) {
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  return r.ec == std::errc{} && r.ptr == end && std::isfinite(v);
}

bool parse_flag(const std::string& s, bool& v) {
  if (s == "true" || s == "yes" || s == "1") return v = true, true;
  if (s == "false" || s == "no" || s == "0") return v = false, true;
  return false;
}

bool valid(ValueType type, const std::string& s) {
  long long i;
  double d;
  bool b;
  switch (type) {
    case integer: return parse_integer(s, i);
    case real: return parse_real(s, d);
    case text: return !s.empty();
    case flag: return parse_flag(s, b);
    case real_list:
    case integer_list:
    case text_list: {
      const auto items = split_list(s);
      if (items.empty()) return false;
      for (const auto& it : items) {
        if (type == real_list && !parse_real(it, d)) return false;
        if (type == integer_list && !parse_integer(it, i)) return false;
        if (type == text_list && it.empty()) return false;
      }
      return true;
    }
  }
  return false;
}

std::string type_name(ValueType type) {
  switch (type) {
    case integer: return "integer";
    case real: return "real";
    case text: return "text";
    case flag: return "flag";
    case real_list: return "list of reals";
    case integer_list: return "list of integers";
    case text_list: return "list of names";
  }
  return "?";
}

unsigned parse_workers(const std::string& s, const std::string& where) {
  long long w = 0;
  if (!parse_integer(s, w) || w < 1 || w > 4096)
    fail(ErrorCategory::config_parse, where + ": workers must be an integer in [1, 4096]");
  return static_cast<unsigned>(w);
}

}  // namespace

const std::vector<ExperimentSpec>& experiments() {
  static const std::vector<ExperimentSpec> registry = build_registry();
  return registry;
}

const ExperimentSpec& experiment_spec(const std::string& name) {
  for (const auto& e : experiments())
    if (e.name == name) return e;
  fail(ErrorCategory::unknown_experiment, "unknown experiment: " + name);
}

RunConfig RunConfig::parse(std::istream& is, const std::string& source) {
  std::map<std::string, std::string> raw;
  std::string line;
  for (int n = 1; std::getline(is, line); ++n) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto where = source + ":" + std::to_string(n);
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(ErrorCategory::config_parse, where + ": expected key = value");
    const auto key = trim(std::string_view(body).substr(0, eq));
    const auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) fail(ErrorCategory::config_parse, where + ": empty key or value");
    if (!raw.emplace(key, value).second) fail(ErrorCategory::config_parse, where + ": duplicate key " + key);
  }

  RunConfig cfg;
  const auto take = [&](const std::string& key) -> std::optional<std::string> {
    const auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    auto v = it->second;
    raw.erase(it);
    return v;
  };
  const auto experiment = take("experiment");
  if (!experiment) fail(ErrorCategory::config_parse, source + ": missing required key experiment");
  const auto& spec = experiment_spec(*experiment);
  cfg.experiment_ = spec.name;

  const auto seed = take("seed");
  if (!seed) fail(ErrorCategory::config_parse, source + ": missing required key seed (no implicit entropy)");
  long long s = 0;
  if (!parse_integer(*seed, s) || s < 0) fail(ErrorCategory::config_parse, source + ": seed must be a non-negative integer");
  cfg.seed_ = static_cast<std::uint64_t>(s);

  if (const auto w = take("workers")) cfg.workers_ = parse_workers(*w, source);
  if (const auto o = take("output_dir"))
    cfg.output_dir_ = *o;
  else
    cfg.output_dir_ = std::filesystem::path("runs") / (spec.name + "_seed" + std::to_string(cfg.seed_));

  for (const auto& k : spec.keys) {
    auto v = take(k.key);
    if (!v) {
      if (k.default_value.empty()) fail(ErrorCategory::config_parse, source + ": missing required key " + k.key);
      v = k.default_value;
    }
    if (!valid(k.type, *v))
      fail(ErrorCategory::config_parse, source + ": " + k.key + " = " + *v + " is not a " + type_name(k.type));
    cfg.values_[k.key] = *v;
  }
  if (!raw.empty())
    fail(ErrorCategory::config_parse,
         source + ": unknown key " + raw.begin()->first + " for experiment " + spec.name);
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCategory::config_parse, "cannot open config " + path.string());
  return parse(is, path.string());
}

void RunConfig::apply_environment() {
  if (const char* o = std::getenv("QIM_OUTPUT_DIR"); o && *o) output_dir_ = o;
  if (const char* w = std::getenv("QIM_WORKERS"); w && *w) workers_ = parse_workers(w, "QIM_WORKERS");
}

const std::string& RunConfig::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) fail(ErrorCategory::config_parse, "key not in schema: " + key);
  return it->second;
}

long long RunConfig::integer(const std::string& key) const {
  long long v = 0;
  parse_integer(raw(key), v);
  return v;
}

double RunConfig::real(const std::string& key) const {
  double v = 0.0;
  parse_real(raw(key), v);
  return v;
}

const std::string& RunConfig::text(const std::string& key) const { return raw(key); }

bool RunConfig::flag(const std::string& key) const {
  bool v = false;
  parse_flag(raw(key), v);
  return v;
}

std::vector<double> RunConfig::reals(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split_list(raw(key))) {
    double v = 0.0;
    parse_real(s, v);
    out.push_back(v);
  }
  return out;
}

std::vector<long long> RunConfig::integers(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& s : split_list(raw(key))) {
    long long v = 0;
    parse_integer(s, v);
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> RunConfig::texts(const std::string& key) const { return split_list(raw(key)); }

std::string RunConfig::resolved_text() const {
  std::ostringstream os;
  os << "experiment = " << experiment_ << "\n"
     << "seed = " << seed_ << "\n"
     << "workers = " << workers_ << "\n"
     << "output_dir = " << output_dir_.string() << "\n";
  for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

std::string fnv1a_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCategory::missing_artifact, "cannot read " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (is.read(buf, sizeof buf) || is.gcount() > 0) {
    for (std::streamsize i = 0; i < is.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

}  // namespace qim::harness
