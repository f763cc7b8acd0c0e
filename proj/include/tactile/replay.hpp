#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "tactile/env.hpp"
#include "tactile/matrix.hpp"
#include "tactile/reward.hpp"

namespace tactile {

struct Transition {
  Observation obs;
  Goal goal;
  Action action;
  double reward = 0.0;
  Observation next_obs;
  Goal achieved_next;
  // NaN marks a transition recorded without force information.
  double force_sum_next = std::numeric_limits<double>::quiet_NaN();
};

struct Episode {
  std::vector<Transition> transitions;
  // First step whose cumulative force crosses eps_force; set by the buffer.
  std::optional<int> t_force;
  std::uint64_t id = 0;
  // A simulation error cut the rollout short; remaining steps are padding.
  bool failed = false;

  int length() const { return static_cast<int>(transitions.size()); }
  double total_reward() const;
};

// First index t with force_sum_next(t) > eps_force, by linear scan.
std::optional<int> find_contact_onset(const Episode& episode, double eps_force);

// Combined reward of `transition` evaluated against `new_goal`, using the
// transition's stored post-step achieved goal and cumulative force.
double recompute_hindsight(const Transition& transition, const Goal& new_goal,
                           const RewardParams& params);

// Bounded FIFO of fixed-length episodes with cached contact onsets.
class EpisodeBuffer {
 public:
  EpisodeBuffer(std::size_t capacity, int horizon, double eps_force, double lambda);

  // Appends, evicting the oldest episode when full. The buffer assigns the id
  // and t_force. Throws DataError on a wrong-length or inconsistent episode.
  void push(Episode episode);

  std::size_t size() const { return episodes_.size(); }
  bool empty() const { return episodes_.empty(); }
  std::size_t capacity() const { return capacity_; }
  int horizon() const { return horizon_; }
  double eps_force() const { return eps_force_; }
  double lambda() const { return lambda_; }
  void set_lambda(double lambda);

  const Episode& operator[](std::size_t i) const { return episodes_[i]; }
  const std::deque<Episode>& episodes() const { return episodes_; }

  // Unnormalized weight of episode i: sum of its per-step weights.
  double episode_weight(std::size_t i) const;

 private:
  std::size_t capacity_;
  int horizon_;
  double eps_force_;
  double lambda_;
  std::uint64_t next_id_ = 0;
  std::deque<Episode> episodes_;
};

// Unnormalized per-(episode, step) weights: 1 before contact onset, lambda from
// the onset step on. Rows are episodes in buffer order.
struct TransitionWeights {
  Matrix weights;
  double total = 0.0;

  double probability(std::size_t e, std::size_t t) const { return weights(e, t) / total; }
};

TransitionWeights transition_weights(const EpisodeBuffer& buffer);

// p_episode(e) = sum_t p_transition(e, t).
std::vector<double> episode_marginal(const TransitionWeights& weights);

enum class SamplerKind { UniformHer, Cper, EpisodeAblation, RewardPrioritized };

std::string_view to_string(SamplerKind kind);

struct MiniBatchItem {
  // Valid until the next push into the buffer.
  const Transition* source = nullptr;
  std::size_t episode = 0;  // position in the buffer
  int t = 0;
  // Index of the virtual-goal step when the sampler drew one, else -1.
  int t_goal = -1;
  bool hindsight = false;
  Goal goal;
  double reward = 0.0;
};

struct SamplerSettings {
  std::size_t batch_size = 256;
  double hindsight_prob = 0.8;
};

// Contact-prioritized replay: episode from p_episode, goal step t' from the
// within-episode conditional, training step t uniform in {0, ..., t'}.
std::vector<MiniBatchItem> sample_cper(const EpisodeBuffer& buffer, const SamplerSettings& settings,
                                       const RewardParams& params, std::mt19937_64& rng);

// HER baseline with the "future" strategy.
std::vector<MiniBatchItem> sample_uniform_her(const EpisodeBuffer& buffer,
                                              const SamplerSettings& settings,
                                              const RewardParams& params, std::mt19937_64& rng);

// Contact-prioritized episodes, uniform goal step, backward training step.
std::vector<MiniBatchItem> sample_episode_ablation(const EpisodeBuffer& buffer,
                                                   const SamplerSettings& settings,
                                                   const RewardParams& params,
                                                   std::mt19937_64& rng);

// Episodes weighted by 1 + stored return, then HER "future" sampling inside.
std::vector<MiniBatchItem> sample_reward_prioritized(const EpisodeBuffer& buffer,
                                                     const SamplerSettings& settings,
                                                     const RewardParams& params,
                                                     std::mt19937_64& rng);

std::vector<MiniBatchItem> sample_batch(SamplerKind kind, const EpisodeBuffer& buffer,
                                        const SamplerSettings& settings,
                                        const RewardParams& params, std::mt19937_64& rng);

}  // namespace tactile
