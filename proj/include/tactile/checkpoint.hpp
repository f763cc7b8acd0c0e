#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tactile/agent.hpp"

// Checkpoint layout (little-endian):
//
//   char[8]  magic "TACTCKPT"
//   u32      version (1)
//   u32      block count
//   per block:
//     u32    name length, then name bytes (e.g. "actor.0.weight")
//     u32    rank
//     u64    dims[rank]
//     f64    values, row-major
//
// Weight blocks are [in, out]; biases and normalizer statistics are rank 1.
// A JSON sidecar (same stem, .json) records hyperparameters and layer sizes.
namespace tactile {

struct TensorBlock {
  std::string name;
  std::vector<std::uint64_t> shape;
  std::vector<double> values;
};

void write_blocks(const std::filesystem::path& path, const std::vector<TensorBlock>& blocks);
std::vector<TensorBlock> read_blocks(const std::filesystem::path& path);

void save_checkpoint(const DdpgAgent& agent, const std::filesystem::path& path);
// Loads parameters and normalizer statistics into an agent of matching shape.
void load_checkpoint(DdpgAgent& agent, const std::filesystem::path& path);

}  // namespace tactile
