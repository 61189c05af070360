#include <cstdio>
#include <exception>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qim/errors.hpp"
#include "qim/harness.hpp"
#include "qim/optics.hpp"

namespace {

using nlohmann::json;

// Errors go to stderr as one JSON object so that callers can dispatch on the category.
int report(std::string_view category, const std::string& message, int code) {
  std::cerr << json{{"error", category}, {"message", message}, {"exit_code", code}}.dump() << "\n";
  return code;
}

void list_presets() {
  std::printf("%-16s %8s %12s %10s\n", "preset", "mirrors", "eta", "loss_rate");
  for (const auto& name : qim::preset_names()) {
    const auto ap = qim::preset(name);
    const double eta = qim::capture_fraction(ap);
    std::printf("%-16s %8d %12.6g %10.4g\n", name.c_str(), ap.mirrors, eta, eta > 0 ? (1 - eta) / eta : 0.0);
  }
}

void list_experiments() {
  for (const auto& e : qim::harness::experiments()) {
    std::printf("%s: %s\n", e.name.c_str(), e.description.c_str());
    for (const auto& k : e.keys) std::printf("    %-40s = %-28s %s\n", k.key.c_str(), k.default_value.c_str(), k.help.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collapse engineering by imaging apertures: experiment runner"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QIM_VERSION);

  std::string config_path, run_dir, figure, out;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  auto* exp = app.add_subcommand("export", "write plot data for a figure from a completed run");
  exp->add_option("run_dir", run_dir, "run directory")->required();
  exp->add_option("figure_id", figure, "fig2 .. fig7")->required();
  exp->add_option("-o,--output", out, "output CSV (default <run_dir>/<figure_id>.csv)");
  auto* presets = app.add_subcommand("presets", "aperture presets");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "list presets with their capture fractions");
  auto* experiments = app.add_subcommand("experiments", "list experiments and their config keys");
  auto* validate = app.add_subcommand("validate", "check a config file and print it resolved");
  validate->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report("usage", e.what(), qim::exit_code(qim::ErrorCategory::invalid_argument));
  }

  try {
    if (*run) {
      auto cfg = qim::harness::RunConfig::load(config_path);
      cfg.apply_environment();
      const auto r = qim::harness::run(cfg);
      std::cout << (r.run_dir / "summary.json").string() << "\n";
    } else if (*exp) {
      std::cout << qim::harness::export_plotdata(run_dir, figure, out).string() << "\n";
    } else if (*presets_list) {
      list_presets();
    } else if (*experiments) {
      list_experiments();
    } else if (*validate) {
      auto cfg = qim::harness::RunConfig::load(config_path);
      cfg.apply_environment();
      std::cout << cfg.resolved_text();
    }
  } catch (const qim::Error& e) {
    return report(qim::to_string(e.category()), e.what(), qim::exit_code(e.category()));
  } catch (const std::exception& e) {
    return report("internal", e.what(), 1);
  }
  return 0;
}
