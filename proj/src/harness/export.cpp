#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "qim/errors.hpp"
#include "qim/harness.hpp"
#include "qim/stats.hpp"

namespace qim::harness {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorCategory::missing_artifact, "CSV column missing: " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
  double number(std::size_t row, std::size_t col) const { return std::stod(rows[row][col]); }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

class RunDir {
 public:
  explicit RunDir(fs::path dir) : dir_(std::move(dir)) {
    std::ifstream is(dir_ / "manifest.json");
    if (!is) fail(ErrorCategory::missing_artifact, "no manifest in " + dir_.string() + " (run incomplete)");
    manifest_ = json::parse(is, nullptr, false);
    if (manifest_.is_discarded()) fail(ErrorCategory::missing_artifact, "unreadable manifest in " + dir_.string());
    for (const auto& o : manifest_.at("outputs")) checksums_[o.at("file").get<std::string>()] = o.at("fnv1a64");
  }

  std::string experiment() const { return manifest_.at("config").at("experiment").get<std::string>(); }
  const json& config() const { return manifest_.at("config"); }

  void expect(const std::string& experiment_name, const std::string& figure) const {
    if (experiment() != experiment_name)
      fail(ErrorCategory::missing_artifact,
           figure + " needs a " + experiment_name + " run; " + dir_.string() + " holds " + experiment());
  }

  /// Verified path of a recorded output.
  fs::path file(const std::string& name) const {
    const auto it = checksums_.find(name);
    if (it == checksums_.end()) fail(ErrorCategory::missing_artifact, "output not in manifest: " + name);
    const auto path = dir_ / name;
    if (!fs::exists(path)) fail(ErrorCategory::missing_artifact, "missing output " + path.string());
    if (fnv1a_file(path) != it->second) fail(ErrorCategory::missing_artifact, "checksum mismatch: " + path.string());
    return path;
  }

  Table table(const std::string& name) const {
    std::ifstream is(file(name));
    Table t;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (t.header.empty())
        t.header = split(line);
      else
        t.rows.push_back(split(line));
    }
    return t;
  }

  json summary() const {
    std::ifstream is(file("summary.json"));
    return json::parse(is);
  }

  std::vector<std::string> outputs() const {
    std::vector<std::string> v;
    for (const auto& [k, _] : checksums_) v.push_back(k);
    return v;
  }

 private:
  fs::path dir_;
  json manifest_;
  std::map<std::string, std::string> checksums_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using Writer = std::ostream&;

// Aperture transmission of every preset in the run.
void fig2(const RunDir& run, Writer os) {
  run.expect("apertures", "fig2");
  os << "preset,xi,t_re,t_im,t_abs\n";
  for (const auto& name : run.outputs()) {
    if (name.rfind("aperture_", 0) != 0) continue;
    const auto preset = name.substr(9, name.size() - 9 - 4);
    const auto t = run.table(name);
    const auto xi = t.column("xi"), re = t.column("re"), im = t.column("im");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      const double a = t.number(r, re), b = t.number(r, im);
      os << preset << "," << t.rows[r][xi] << "," << t.rows[r][re] << "," << t.rows[r][im] << "," << num(std::hypot(a, b))
         << "\n";
    }
  }
}

// One column per alpha, on the shared time axis.
void fig3(const RunDir& run, Writer os) {
  run.expect("levy_paths", "fig3");
  const auto t = run.table("paths.csv");
  const auto ca = t.column("alpha"), ct = t.column("t"), cv = t.column("value");
  std::vector<std::string> alphas;
  std::map<std::string, std::vector<std::string>> series;
  std::vector<std::string> times;
  for (const auto& row : t.rows) {
    if (std::find(alphas.begin(), alphas.end(), row[ca]) == alphas.end()) alphas.push_back(row[ca]);
    if (row[ca] == alphas.front()) times.push_back(row[ct]);
    series[row[ca]].push_back(row[cv]);
  }
  os << "t";
  for (const auto& a : alphas) os << ",alpha_" << a;
  os << "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << times[i];
    for (const auto& a : alphas) os << "," << (i < series[a].size() ? series[a][i] : "");
    os << "\n";
  }
}

// Mean reduction per rung with the fitted power law.
void fig4(const RunDir& run, Writer os) {
  run.expect("levy_scaling", "fig4");
  const auto t = run.table("scaling.csv");
  const auto ca = t.column("alpha"), cn = t.column("rung"), cm = t.column("mean_reduction"), cs = t.column("reduction_se");
  std::map<std::string, std::vector<std::size_t>> by_alpha;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (!by_alpha.count(t.rows[r][ca])) order.push_back(t.rows[r][ca]);
    by_alpha[t.rows[r][ca]].push_back(r);
  }
  os << "alpha,measurements,mean_reduction,reduction_se,fitted_reduction\n";
  for (const auto& a : order) {
    std::vector<double> x, y;
    for (auto r : by_alpha[a]) {
      x.push_back(std::log(t.number(r, cn)));
      y.push_back(std::log(t.number(r, cm)));
    }
    const auto fit = stats::linear_fit(x, y);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const auto r = by_alpha[a][k];
      os << a << "," << t.rows[r][cn] << "," << t.rows[r][cm] << "," << t.rows[r][cs] << ","
         << num(std::exp(fit.intercept + fit.slope * x[k])) << "\n";
    }
  }
}

// Analytic exponent curve and the measured slopes.
void fig5(const RunDir& run, Writer os) {
  run.expect("levy_scaling", "fig5");
  const auto s = run.summary();
  os << "series,alpha,slope,ci_lo,ci_hi\n";
  for (int i = 0; i <= 100; ++i) {
    const double a = 1.0 + 0.01 * i;
    const double v = 2.0 / a - 1.0;
    os << "analytic," << num(a) << "," << num(v) << "," << num(v) << "," << num(v) << "\n";
  }
  for (const auto& e : s.at("alphas")) {
    const auto& sl = e.at("slope");
    os << "measured," << num(e.at("alpha").get<double>()) << "," << num(sl.at("estimate").get<double>()) << ","
       << num(sl.at("ci95")[0].get<double>()) << "," << num(sl.at("ci95")[1].get<double>()) << "\n";
  }
}

void fig6(const RunDir& run, Writer os) {
  run.expect("cauchy_wigner", "fig6");
  std::ifstream is(run.file("wigner.csv"));
  os << is.rdbuf();
}

// <X> against measurement index for the first eight trajectories.
void fig7(const RunDir& run, Writer os) {
  run.expect("anomalous_diffusion", "fig7");
  const auto t = run.table("records.csv");
  const auto ct = t.column("trajectory"), cn = t.column("measurement"), cx = t.column("mean_x");
  std::map<long, std::map<long, std::string>> series;
  for (const auto& row : t.rows) {
    const long traj = std::stol(row[ct]);
    if (traj < 8) series[traj][std::stol(row[cn])] = row[cx];
  }
  if (series.empty()) fail(ErrorCategory::missing_artifact, "fig7: no trajectory records");
  long last = 0;
  for (const auto& [_, s] : series) last = std::max(last, s.rbegin()->first);
  os << "measurement";
  for (const auto& [k, _] : series) os << ",trajectory_" << k;
  os << "\n";
  for (long n = 1; n <= last; ++n) {
    os << n;
    for (const auto& [_, s] : series) {
      const auto it = s.find(n);
      os << "," << (it == s.end() ? "" : it->second);
    }
    os << "\n";
  }
}

}  // namespace

std::vector<std::string> figure_ids() { return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

fs::path export_plotdata(const fs::path& run_dir, const std::string& figure_id, const fs::path& out) {
  static const std::map<std::string, void (*)(const RunDir&, Writer)> figures{
      {"fig2", fig2}, {"fig3", fig3}, {"fig4", fig4}, {"fig5", fig5}, {"fig6", fig6}, {"fig7", fig7}};
  const auto it = figures.find(figure_id);
  if (it == figures.end()) fail(ErrorCategory::invalid_argument, "unknown figure id: " + figure_id);
  const RunDir run(run_dir);
  std::ostringstream buf;
  it->second(run, buf);
  const auto path = out.empty() ? run_dir / (figure_id + ".csv") : out;
  std::ofstream os(path);
  if (!os) fail(ErrorCategory::resource, "cannot write " + path.string());
  os << buf.str();
  if (!os) fail(ErrorCategory::resource, "write failed: " + path.string());
  return path;
}

}  // namespace qim::harness
