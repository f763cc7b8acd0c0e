#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tactile/config.hpp"

namespace tactile {

// Grid document:
//   { "base": { ...ExperimentConfig fields... },
//     "arms": ["her", "cper_ir"], "tasks": ["push"],
//     "difficulties": ["simple"], "seeds": [1, 2, 3] }
// Cells are the cartesian product arms x tasks x difficulties x seeds, each
// built from the task defaults overlaid with `base`.
struct GridSpec {
  nlohmann::json base = nlohmann::json::object();
  std::vector<Arm> arms;
  std::vector<Task> tasks;
  std::vector<Difficulty> difficulties;
  std::vector<std::uint64_t> seeds;
};

GridSpec grid_from_json(const nlohmann::json& j);
GridSpec load_grid(const std::filesystem::path& path);
std::vector<ExperimentConfig> enumerate_cells(const GridSpec& spec);

struct GridReport {
  int ran = 0;
  int skipped = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // (cell, message)
};

// Runs every cell into <out>/<run_name>/ on a pool of `jobs` threads. With
// `skip_existing`, cells whose checkpoint already exists are skipped. A failing
// cell is recorded and the grid continues.
GridReport run_grid(const GridSpec& spec, const std::filesystem::path& out, int jobs,
                    bool skip_existing, std::ostream* log = nullptr);

}  // namespace tactile
