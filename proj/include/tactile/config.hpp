#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tactile/agent.hpp"
#include "tactile/env.hpp"
#include "tactile/physics.hpp"
#include "tactile/replay.hpp"
#include "tactile/reward.hpp"

namespace tactile {

// The seven experiment arms. Each fixes the sampler, whether force channels
// enter the observation, and whether the intrinsic reward is paid.
enum class Arm { Her, HerTactile, Ir, Cper, CperIr, EpisodeAblation, RewardPrioritized };

struct ArmSettings {
  SamplerKind sampler;
  bool tactile_in_state;
  bool intrinsic_reward;
};

ArmSettings arm_settings(Arm arm);
std::string_view to_string(Arm arm);
Arm parse_arm(std::string_view name);

struct ExperimentConfig {
  Task task = Task::Push;
  Difficulty difficulty = Difficulty::Simple;
  Arm arm = Arm::CperIr;

  RewardParams reward;
  PhysicsConfig physics;
  EnvConfig env;
  DdpgHyper ddpg;

  double lambda = 10.0;
  double hindsight_prob = 0.8;
  std::size_t buffer_episodes = 10000;

  int epochs = 50;
  int episodes_per_epoch = 40;
  int optimizer_steps_per_episode = 40;
  int eval_episodes = 20;
  std::uint64_t seed = 1;
  // Off by default so metrics files are byte-reproducible; timings always go
  // to the timing sidecar.
  bool record_wall_clock = false;

  static ExperimentConfig defaults(Task task);

  bool tactile_in_state() const { return arm_settings(arm).tactile_in_state; }
  SamplerKind sampler() const { return arm_settings(arm).sampler; }
  // Reward actually paid by this arm: the plain {0, 1} sparse reward when the
  // intrinsic term is disabled.
  RewardParams effective_reward() const;
  // Bellman targets are clamped to [0, max reward / (1 - gamma)].
  DdpgHyper effective_ddpg() const;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

nlohmann::json to_json(const ExperimentConfig& config);
// Starts from the task defaults and applies every present field. Unknown
// fields and type errors raise ConfigError with the JSON path.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

// <task>-<difficulty>-<arm>-seed<k>
std::string run_name(const ExperimentConfig& config);

// Stable 64-bit FNV-1a over the canonical JSON dump.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace tactile
