// Command-line front end: single runs, seed/arm grids, and curve aggregation.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tactile/config.hpp"
#include "tactile/curves.hpp"
#include "tactile/errors.hpp"
#include "tactile/grid.hpp"
#include "tactile/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFailure = 1;

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<std::string> arm, task, difficulty;
  std::string out = "runs";
};

int cmd_run(const RunArgs& args) {
  if (!fs::exists(args.config)) {
    std::cerr << "error: config file not found: " << args.config << '\n';
    return kExitConfig;
  }
  tactile::ExperimentConfig config;
  try {
    std::ifstream in(args.config);
    json j = json::parse(in);
    if (!j.is_object()) throw tactile::ConfigError("config: expected a JSON object");
    if (args.seed) j["seed"] = *args.seed;
    if (args.epochs) j["epochs"] = *args.epochs;
    if (args.arm) {
      j["arm"] = *args.arm;
      j.erase("tactile_in_state");
    }
    if (args.task) j["task"] = *args.task;
    if (args.difficulty) j["difficulty"] = *args.difficulty;
    config = tactile::config_from_json(j);
  } catch (const json::parse_error& e) {
    std::cerr << "error: " << args.config << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const tactile::ConfigError& e) {
    std::cerr << "error: invalid config " << args.config << ": " << e.what() << '\n';
    return kExitConfig;
  }

  const fs::path dir = fs::path(args.out) / tactile::run_name(config);
  std::cout << "run " << tactile::run_name(config) << " -> " << dir.string() << '\n';
  try {
    tactile::RunOptions opts;
    opts.output_dir = dir;
    opts.stop = [](const tactile::MetricsRow& r) {
      std::cout << "epoch " << r.epoch << "  train " << r.train_success << "  eval " << r.eval_success
                << "  reward " << r.mean_reward << '\n'
                << std::flush;
      return false;
    };
    tactile::run_experiment(config, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}

int cmd_grid(const std::string& path, const std::string& out, int jobs, bool skip_existing) {
  if (!fs::exists(path)) {
    std::cerr << "error: grid file not found: " << path << '\n';
    return kExitConfig;
  }
  tactile::GridSpec spec;
  try {
    spec = tactile::load_grid(path);
  } catch (const tactile::ConfigError& e) {
    std::cerr << "error: invalid grid " << path << ": " << e.what() << '\n';
    return kExitConfig;
  }
  const auto report = tactile::run_grid(spec, out, jobs, skip_existing, &std::cout);
  std::cout << "grid: " << report.ran << " ran, " << report.skipped << " skipped, "
            << report.failures.size() << " failed\n";
  for (const auto& [cell, msg] : report.failures) std::cout << "  failed " << cell << ": " << msg << '\n';
  return report.failures.empty() ? 0 : kExitFailure;
}

int cmd_curves(const std::string& pattern, const std::string& out) {
  const auto files = tactile::expand_glob(pattern);
  if (files.empty()) {
    std::cerr << "error: no metrics files match " << pattern << '\n';
    return kExitFailure;
  }
  try {
    const auto curves = tactile::aggregate_files(files);
    fs::path csv_path = out;
    if (!csv_path.has_extension()) csv_path += ".csv";
    fs::path svg_path = csv_path;
    svg_path.replace_extension(".svg");
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    std::ofstream csv(csv_path);
    tactile::write_curves_csv(csv, curves);
    std::ofstream svg(svg_path);
    svg << tactile::render_svg(curves, "Eval success (mean, 95% CI)");
    std::cout << "wrote " << csv_path.string() << " and " << svg_path.string() << " ("
              << curves.size() << " curves from " << files.size() << " runs)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile-prioritized goal-conditioned RL on planar manipulation tasks"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("config", run.config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--seed", run.seed, "Override the seed");
  run_cmd->add_option("--epochs", run.epochs, "Override the epoch count");
  run_cmd->add_option("--arm", run.arm, "Override the experiment arm");
  run_cmd->add_option("--task", run.task, "Override the task");
  run_cmd->add_option("--difficulty", run.difficulty, "Override the difficulty");
  run_cmd->add_option("--out", run.out, "Output root directory");

  std::string grid_path, grid_out = "runs";
  int jobs = 1;
  bool skip_existing = false;
  auto* grid_cmd = app.add_subcommand("grid", "Run an arms x tasks x difficulties x seeds grid");
  grid_cmd->add_option("grid", grid_path, "Grid config (JSON)")->required();
  grid_cmd->add_option("--out", grid_out, "Output root directory");
  grid_cmd->add_option("--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);
  grid_cmd->add_flag("--skip-existing", skip_existing, "Skip cells that already finished");

  std::string pattern, curves_out = "curves";
  auto* curves_cmd = app.add_subcommand("curves", "Aggregate metrics CSVs into mean +- CI curves");
  curves_cmd->add_option("--results", pattern, "Glob of metrics.csv files")->required();
  curves_cmd->add_option("--out", curves_out, "Output path (CSV; SVG written alongside)");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) return cmd_run(run);
  if (*grid_cmd) return cmd_grid(grid_path, grid_out, jobs, skip_existing);
  if (*curves_cmd) return cmd_curves(pattern, curves_out);
  return 0;
}
