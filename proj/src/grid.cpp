#include "tactile/grid.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "tactile/errors.hpp"
#include "tactile/trainer.hpp"

namespace tactile {

using nlohmann::json;

GridSpec grid_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("grid: expected a JSON object");
  GridSpec g;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "base") {
        if (!value.is_object()) throw ConfigError("expected an object");
        g.base = value;
      } else if (key == "arms") {
        for (const auto& a : value) g.arms.push_back(parse_arm(a.get<std::string>()));
      } else if (key == "tasks") {
        for (const auto& t : value) g.tasks.push_back(parse_task(t.get<std::string>()));
      } else if (key == "difficulties") {
        for (const auto& d : value) g.difficulties.push_back(parse_difficulty(d.get<std::string>()));
      } else if (key == "seeds") {
        g.seeds = value.get<std::vector<std::uint64_t>>();
      } else {
        throw ConfigError("unknown field");
      }
    } catch (const json::exception& e) {
      throw ConfigError("grid." + key + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("grid." + key + ": " + e.what());
    }
  }
  if (g.arms.empty()) throw ConfigError("grid.arms: must list at least one arm");
  if (g.seeds.empty()) throw ConfigError("grid.seeds: must list at least one seed");
  if (g.tasks.empty()) {
    g.tasks.push_back(g.base.contains("task") ? parse_task(g.base["task"].get<std::string>()) : Task::Push);
  }
  if (g.difficulties.empty()) {
    g.difficulties.push_back(g.base.contains("difficulty")
                                 ? parse_difficulty(g.base["difficulty"].get<std::string>())
                                 : Difficulty::Simple);
  }
  // Validate the base once so errors surface before any cell runs.
  for (Task t : g.tasks) {
    json probe = g.base;
    probe["task"] = std::string(to_string(t));
    config_from_json(probe);
  }
  return g;
}

GridSpec load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file " + path.string());
  try {
    return grid_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<ExperimentConfig> enumerate_cells(const GridSpec& spec) {
  std::vector<ExperimentConfig> cells;
  for (Arm arm : spec.arms)
    for (Task task : spec.tasks)
      for (Difficulty level : spec.difficulties)
        for (std::uint64_t seed : spec.seeds) {
          json j = spec.base;
          j.erase("tactile_in_state");
          j["task"] = std::string(to_string(task));
          j["arm"] = std::string(to_string(arm));
          j["difficulty"] = std::string(to_string(level));
          j["seed"] = seed;
          cells.push_back(config_from_json(j));
        }
  return cells;
}

GridReport run_grid(const GridSpec& spec, const std::filesystem::path& out, int jobs,
                    bool skip_existing, std::ostream* log) {
  const auto cells = enumerate_cells(spec);
  GridReport report;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const ExperimentConfig& cell = cells[i];
      const std::string name = run_name(cell);
      const auto dir = out / name;
      if (skip_existing && std::filesystem::exists(dir / "checkpoint.bin")) {
        std::lock_guard lock(mu);
        ++report.skipped;
        if (log) *log << "skip " << name << '\n';
        continue;
      }
      try {
        RunOptions opts;
        opts.output_dir = dir;
        const auto rows = run_experiment(cell, opts);
        std::lock_guard lock(mu);
        ++report.ran;
        if (log)
          *log << "done " << name << " (" << rows.size() << " epochs, final eval "
               << (rows.empty() ? 0.0 : rows.back().eval_success) << ")\n";
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        report.failures.emplace_back(name, e.what());
        if (log) *log << "FAIL " << name << ": " << e.what() << '\n';
      }
    }
  };
  const int n = std::max(1, jobs);
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return report;
}

}  // namespace tactile
