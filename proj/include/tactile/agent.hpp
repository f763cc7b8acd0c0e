#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "tactile/env.hpp"
#include "tactile/matrix.hpp"
#include "tactile/mlp.hpp"
#include "tactile/normalizer.hpp"
#include "tactile/optimizer.hpp"

namespace tactile {

struct DdpgHyper {
  std::vector<std::size_t> hidden{64, 64, 64};
  double gamma = 0.98;
  double tau = 0.05;
  double lr_actor = 1e-3;
  double lr_critic = 1e-3;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double noise_sigma = 0.2;
  double random_eps = 0.3;
  std::size_t batch_size = 128;
  double action_l2 = 1.0;  // weight of the pre-tanh action penalty
  double q_clip_low = 0.0;
  double q_clip_high = 50.0;
  double obs_clip = 5.0;

  void validate() const;
};

struct AgentDims {
  std::size_t obs = 0;
  std::size_t goal = 0;
  std::size_t action = 0;
};

// Batch in raw (unnormalized) feature space, one row per sample.
struct TrainingBatch {
  Matrix obs;
  Matrix goal;
  Matrix action;
  Matrix next_obs;
  std::vector<double> reward;

  std::size_t size() const { return reward.size(); }
};

// Same batch after input normalization; `state` and `next_state` are the
// concatenated [obs | goal] network inputs.
struct NetworkBatch {
  Matrix state;
  Matrix next_state;
  Matrix action;
  std::vector<double> reward;

  std::size_t size() const { return reward.size(); }
};

// Policy on normalized inputs: tanh-bounded action.
Action actor_forward(const Mlp& actor, std::span<const double> obs, std::span<const double> goal);
double critic_forward(const Mlp& critic, std::span<const double> obs, std::span<const double> goal,
                      std::span<const double> action);

// y = r + gamma * Q'(s', g, pi'(s', g)), clamped to [q_clip_low, q_clip_high].
std::vector<double> td_targets(const NetworkBatch& batch, const Mlp& target_actor,
                               const Mlp& target_critic, const DdpgHyper& hyper);

// Mean squared Bellman error and its gradient (added into `grad`).
double critic_loss(const Mlp& critic, const NetworkBatch& batch, std::span<const double> targets);
double critic_loss_gradient(const Mlp& critic, const NetworkBatch& batch,
                            std::span<const double> targets, std::span<double> grad);

// J = mean Q(s, g, pi(s, g)) - action_l2 * mean(z^2), z the pre-tanh action.
// The gradient (dJ/dtheta_actor, ascent direction) is added into `grad`.
double actor_objective(const Mlp& actor, const Mlp& critic, const NetworkBatch& batch,
                       double action_l2);
double actor_objective_gradient(const Mlp& actor, const Mlp& critic, const NetworkBatch& batch,
                                double action_l2, std::span<double> grad);

class DdpgAgent {
 public:
  DdpgAgent(AgentDims dims, DdpgHyper hyper, std::uint64_t seed);

  const AgentDims& dims() const { return dims_; }
  const DdpgHyper& hyper() const { return hyper_; }

  // Deterministic policy output for raw features.
  Action act(std::span<const double> obs, std::span<const double> goal) const;
  // Random action with probability random_eps, else policy plus Gaussian
  // noise, clamped to [-1, 1].
  Action explore(std::span<const double> obs, std::span<const double> goal,
                 std::mt19937_64& rng) const;

  void update_normalizers(const Matrix& obs, const Matrix& goals);
  NetworkBatch prepare(const TrainingBatch& batch) const;

  std::vector<double> td_targets(const NetworkBatch& batch) const;
  // One gradient step on the critic; returns the pre-step loss.
  double critic_update(const NetworkBatch& batch, std::span<const double> targets);
  // One ascent step on the actor with the critic frozen; returns the
  // pre-step objective.
  double actor_update(const NetworkBatch& batch);
  void soft_update_targets();

  struct StepStats {
    double critic_loss = 0.0;
    double actor_objective = 0.0;
  };
  // Targets, critic step, actor step, target tracking.
  StepStats train(const TrainingBatch& batch);

  Mlp& actor() { return actor_; }
  Mlp& critic() { return critic_; }
  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& target_actor() const { return target_actor_; }
  const Mlp& target_critic() const { return target_critic_; }
  Mlp& target_actor() { return target_actor_; }
  Mlp& target_critic() { return target_critic_; }
  const Normalizer& obs_normalizer() const { return obs_norm_; }
  const Normalizer& goal_normalizer() const { return goal_norm_; }
  Normalizer& obs_normalizer() { return obs_norm_; }
  Normalizer& goal_normalizer() { return goal_norm_; }

 private:
  AgentDims dims_;
  DdpgHyper hyper_;
  Mlp actor_, critic_, target_actor_, target_critic_;
  Optimizer actor_opt_, critic_opt_;
  Normalizer obs_norm_, goal_norm_;
  std::vector<double> grad_scratch_;
};

}  // namespace tactile
