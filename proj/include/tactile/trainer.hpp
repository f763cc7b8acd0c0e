#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "tactile/agent.hpp"
#include "tactile/config.hpp"
#include "tactile/planar_envs.hpp"
#include "tactile/replay.hpp"

namespace tactile {

struct MetricsRow {
  int epoch = 0;
  double train_success = 0.0;
  double eval_success = 0.0;
  double mean_reward = 0.0;  // mean per-episode return over training episodes
  double onset_step = -1.0;  // mean contact-onset step, -1 if no episode made contact
  double seconds = 0.0;      // wall clock of the epoch

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

using Policy = std::function<Action(const Observation&, const Goal&)>;

// Rolls out one episode from an environment that has just been reset to
// (`first`, `goal`). Rewards use `params`; a simulation error pads the rest of
// the episode with frozen transitions and marks it failed.
Episode collect_episode(Env& env, const Observation& first, const Goal& goal, const Policy& policy,
                        const RewardParams& params);

// Final-step success of an episode.
bool episode_success(const Episode& episode, double eps_pos);

// Deterministic stream splitting: distinct (seed, stream, index) triples give
// independent-looking 64-bit seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

class Trainer {
 public:
  explicit Trainer(ExperimentConfig config);

  MetricsRow run_epoch();

  // Success rate of `policy` over `episodes` fresh goals.
  double evaluate(const Policy& policy, int episodes, std::uint64_t seed_stream);

  Policy greedy_policy() const;
  Policy exploration_policy();

  const ExperimentConfig& config() const { return config_; }
  const DdpgAgent& agent() const { return agent_; }
  DdpgAgent& agent() { return agent_; }
  const EpisodeBuffer& buffer() const { return buffer_; }
  PlanarEnv& env() { return *env_; }
  int epochs_done() const { return epoch_; }

 private:
  std::vector<double> features(const Observation& obs) const;
  void observe_episode(const Episode& episode);
  TrainingBatch assemble(const std::vector<MiniBatchItem>& items) const;

  ExperimentConfig config_;
  RewardParams reward_;
  std::unique_ptr<PlanarEnv> env_;
  DdpgAgent agent_;
  EpisodeBuffer buffer_;
  std::mt19937_64 rng_;
  int epoch_ = 0;
  std::uint64_t episodes_collected_ = 0;
};

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  // Called after every epoch; returning true stops the run early.
  std::function<bool(const MetricsRow&)> stop;
};

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

// Metrics CSV: epoch,train_success,eval_success,mean_reward,onset_step,seconds
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRow& row);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

}  // namespace tactile
