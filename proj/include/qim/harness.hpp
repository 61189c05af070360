#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace qim::harness {

enum class ValueType { integer, real, text, flag, real_list, integer_list, text_list };

struct KeySpec {
  std::string key;
  ValueType type = ValueType::real;
  std::string default_value;  // empty: required
  std::string help;
};

struct ExperimentSpec {
  std::string name;
  std::string description;
  std::vector<KeySpec> keys;  // experiment-specific keys
};

const std::vector<ExperimentSpec>& experiments();
const ExperimentSpec& experiment_spec(const std::string& name);

/// Parsed and validated run configuration. Text format: one `key = value` per line, `#` starts a
/// comment, lists are comma separated. `experiment` and `seed` are required; `workers` and
/// `output_dir` are optional and may be overridden by QIM_WORKERS and QIM_OUTPUT_DIR.
class RunConfig {
 public:
  static RunConfig parse(std::istream& is, const std::string& source = "<config>");
  static RunConfig load(const std::filesystem::path& path);
  /// Applies QIM_OUTPUT_DIR and QIM_WORKERS, if set.
  void apply_environment();

  const std::string& experiment() const { return experiment_; }
  std::uint64_t seed() const { return seed_; }
  unsigned workers() const { return workers_; }
  void set_workers(unsigned w) { workers_ = w; }
  const std::filesystem::path& output_dir() const { return output_dir_; }
  void set_output_dir(std::filesystem::path p) { output_dir_ = std::move(p); }

  long long integer(const std::string& key) const;
  double real(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<long long> integers(const std::string& key) const;
  std::vector<std::string> texts(const std::string& key) const;

  /// Experiment keys with defaults filled in, sorted by key.
  const std::map<std::string, std::string>& values() const { return values_; }
  /// Canonical text form: experiment, seed, workers, output_dir, then the experiment keys.
  std::string resolved_text() const;

 private:
  std::string experiment_;
  std::uint64_t seed_ = 0;
  unsigned workers_ = 1;
  std::filesystem::path output_dir_;
  std::map<std::string, std::string> values_;

  const std::string& raw(const std::string& key) const;
};

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string fnv1a_file(const std::filesystem::path& path);

struct RunOutcome {
  std::filesystem::path run_dir;
  std::vector<std::string> outputs;  // file names relative to run_dir, manifest excluded
};

/// Executes the configured experiment and writes CSV records, summary.json and, last,
/// manifest.json into the output directory.
RunOutcome run(const RunConfig& config);

/// Figures: fig2 .. fig7. Writes <run_dir>/<figure_id>.csv (or `out` if given) and returns its path.
std::filesystem::path export_plotdata(const std::filesystem::path& run_dir, const std::string& figure_id,
                                      const std::filesystem::path& out = {});
std::vector<std::string> figure_ids();

}  // namespace qim::harness
