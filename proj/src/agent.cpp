#include "tactile/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tactile/errors.hpp"

namespace tactile {

void DdpgHyper::validate() const {
  if (hidden.empty()) throw ConfigError("ddpg.hidden: need at least one hidden layer");
  for (std::size_t h : hidden)
    if (h == 0) throw ConfigError("ddpg.hidden: layer sizes must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("ddpg.gamma: must be in (0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("ddpg.tau: must be in (0, 1]");
  if (!(lr_actor > 0.0)) throw ConfigError("ddpg.lr_actor: must be > 0");
  if (!(lr_critic > 0.0)) throw ConfigError("ddpg.lr_critic: must be > 0");
  if (!(noise_sigma >= 0.0)) throw ConfigError("ddpg.noise_sigma: must be >= 0");
  if (!(random_eps >= 0.0 && random_eps <= 1.0)) throw ConfigError("ddpg.random_eps: must be in [0, 1]");
  if (batch_size == 0) throw ConfigError("ddpg.batch_size: must be >= 1");
  if (!(action_l2 >= 0.0)) throw ConfigError("ddpg.action_l2: must be >= 0");
  if (!(q_clip_low < q_clip_high)) throw ConfigError("ddpg.q_clip: low must be below high");
  if (!(obs_clip > 0.0)) throw ConfigError("ddpg.obs_clip: must be > 0");
}

namespace {

Matrix row_matrix(std::span<const double> a, std::span<const double> b,
                  std::span<const double> c = {}) {
  Matrix m(1, a.size() + b.size() + c.size());
  auto r = m.row(0);
  std::copy(a.begin(), a.end(), r.begin());
  std::copy(b.begin(), b.end(), r.begin() + static_cast<std::ptrdiff_t>(a.size()));
  std::copy(c.begin(), c.end(), r.begin() + static_cast<std::ptrdiff_t>(a.size() + b.size()));
  return m;
}

// Mean of pre-tanh squares over every action component.
double penalty(const Matrix& z) {
  double s = 0.0;
  for (double v : z.flat()) s += v * v;
  return s / static_cast<double>(z.size());
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw TrainingError(std::string("non-finite ") + what);
}

}  // namespace

Action actor_forward(const Mlp& actor, std::span<const double> obs, std::span<const double> goal) {
  if (obs.size() + goal.size() != actor.input_dim())
    throw UsageError("actor input has wrong dimension");
  const Matrix out = actor.forward(row_matrix(obs, goal));
  auto r = out.row(0);
  return Action(r.begin(), r.end());
}

double critic_forward(const Mlp& critic, std::span<const double> obs, std::span<const double> goal,
                      std::span<const double> action) {
  if (obs.size() + goal.size() + action.size() != critic.input_dim())
    throw UsageError("critic input has wrong dimension");
  return critic.forward(row_matrix(obs, goal, action))(0, 0);
}

std::vector<double> td_targets(const NetworkBatch& batch, const Mlp& target_actor,
                               const Mlp& target_critic, const DdpgHyper& hyper) {
  const Matrix next_action = target_actor.forward(batch.next_state);
  const Matrix q_next = target_critic.forward(hconcat({&batch.next_state, &next_action}));
  std::vector<double> y(batch.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = std::clamp(batch.reward[i] + hyper.gamma * q_next(i, 0), hyper.q_clip_low,
                      hyper.q_clip_high);
  return y;
}

double critic_loss(const Mlp& critic, const NetworkBatch& batch, std::span<const double> targets) {
  const Matrix q = critic.forward(hconcat({&batch.state, &batch.action}));
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double d = q(i, 0) - targets[i];
    loss += d * d;
  }
  return loss / static_cast<double>(batch.size());
}

double critic_loss_gradient(const Mlp& critic, const NetworkBatch& batch,
                            std::span<const double> targets, std::span<double> grad) {
  if (targets.size() != batch.size()) throw UsageError("target count differs from batch size");
  Mlp::Trace trace;
  critic.forward(hconcat({&batch.state, &batch.action}), trace);
  const Matrix& q = trace.activations.back();
  const double n = static_cast<double>(batch.size());
  Matrix dq(batch.size(), 1);
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double d = q(i, 0) - targets[i];
    loss += d * d;
    dq(i, 0) = 2.0 * d / n;
  }
  critic.backward(trace, dq, grad);
  return loss / n;
}

double actor_objective(const Mlp& actor, const Mlp& critic, const NetworkBatch& batch,
                       double action_l2) {
  Mlp::Trace trace;
  actor.forward(batch.state, trace);
  const Matrix q = critic.forward(hconcat({&batch.state, &trace.activations.back()}));
  double mean_q = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) mean_q += q(i, 0);
  mean_q /= static_cast<double>(batch.size());
  return mean_q - action_l2 * penalty(trace.output_preactivation);
}

double actor_objective_gradient(const Mlp& actor, const Mlp& critic, const NetworkBatch& batch,
                                double action_l2, std::span<double> grad) {
  Mlp::Trace actor_trace;
  actor.forward(batch.state, actor_trace);
  const Matrix& action = actor_trace.activations.back();
  const Matrix& z = actor_trace.output_preactivation;

  Mlp::Trace critic_trace;
  critic.forward(hconcat({&batch.state, &action}), critic_trace);
  const Matrix& q = critic_trace.activations.back();
  const std::size_t n = batch.size();
  Matrix dq(n, 1, 1.0 / static_cast<double>(n));
  double mean_q = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_q += q(i, 0);
  mean_q /= static_cast<double>(n);

  // Critic parameters stay frozen: only the input gradient is needed.
  const Matrix d_input = critic.backward(critic_trace, dq, {});
  const std::size_t a_off = batch.state.cols();
  const double pen_scale = 2.0 * action_l2 / static_cast<double>(z.size());
  Matrix dz(n, action.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < action.cols(); ++j) {
      const double a = action(i, j);
      dz(i, j) = d_input(i, a_off + j) * (1.0 - a * a) - pen_scale * z(i, j);
    }
  }
  actor.backward(actor_trace, dz, grad);
  return mean_q - action_l2 * penalty(z);
}

DdpgAgent::DdpgAgent(AgentDims dims, DdpgHyper hyper, std::uint64_t seed)
    : dims_(dims),
      hyper_(std::move(hyper)),
      actor_opt_(OptimizerKind::Sgd, 1.0, 0),
      critic_opt_(OptimizerKind::Sgd, 1.0, 0),
      obs_norm_(dims.obs, hyper_.obs_clip),
      goal_norm_(dims.goal, hyper_.obs_clip) {
  hyper_.validate();
  if (dims.obs == 0 || dims.goal == 0 || dims.action == 0)
    throw ConfigError("agent dimensions must be >= 1");
  std::vector<std::size_t> actor_sizes{dims.obs + dims.goal};
  actor_sizes.insert(actor_sizes.end(), hyper_.hidden.begin(), hyper_.hidden.end());
  actor_sizes.push_back(dims.action);
  std::vector<std::size_t> critic_sizes{dims.obs + dims.goal + dims.action};
  critic_sizes.insert(critic_sizes.end(), hyper_.hidden.begin(), hyper_.hidden.end());
  critic_sizes.push_back(1);

  std::mt19937_64 rng(seed);
  actor_ = Mlp(actor_sizes, OutputActivation::Tanh);
  critic_ = Mlp(critic_sizes, OutputActivation::Identity);
  actor_.initialize(rng);
  critic_.initialize(rng);
  target_actor_ = actor_;
  target_critic_ = critic_;
  actor_opt_ = Optimizer(hyper_.optimizer, hyper_.lr_actor, actor_.parameter_count());
  critic_opt_ = Optimizer(hyper_.optimizer, hyper_.lr_critic, critic_.parameter_count());
}

Action DdpgAgent::act(std::span<const double> obs, std::span<const double> goal) const {
  if (obs.size() != dims_.obs || goal.size() != dims_.goal)
    throw UsageError("agent input has wrong dimension");
  return actor_forward(actor_, obs_norm_.normalize(obs), goal_norm_.normalize(goal));
}

Action DdpgAgent::explore(std::span<const double> obs, std::span<const double> goal,
                          std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Action a;
  if (unit(rng) < hyper_.random_eps) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    a.resize(dims_.action);
    for (double& v : a) v = u(rng);
    return a;
  }
  a = act(obs, goal);
  if (hyper_.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, hyper_.noise_sigma);
    for (double& v : a) v += noise(rng);
  }
  return clamp_action(a);
}

void DdpgAgent::update_normalizers(const Matrix& obs, const Matrix& goals) {
  obs_norm_.update(obs);
  goal_norm_.update(goals);
}

NetworkBatch DdpgAgent::prepare(const TrainingBatch& batch) const {
  const Matrix g = goal_norm_.normalize(batch.goal);
  const Matrix o = obs_norm_.normalize(batch.obs);
  const Matrix o2 = obs_norm_.normalize(batch.next_obs);
  NetworkBatch nb;
  nb.state = hconcat({&o, &g});
  nb.next_state = hconcat({&o2, &g});
  nb.action = batch.action;
  nb.reward = batch.reward;
  return nb;
}

std::vector<double> DdpgAgent::td_targets(const NetworkBatch& batch) const {
  return tactile::td_targets(batch, target_actor_, target_critic_, hyper_);
}

double DdpgAgent::critic_update(const NetworkBatch& batch, std::span<const double> targets) {
  grad_scratch_.assign(critic_.parameter_count(), 0.0);
  const double loss = critic_loss_gradient(critic_, batch, targets, grad_scratch_);
  require_finite(loss, "critic loss");
  critic_opt_.step(critic_.parameters(), grad_scratch_);
  return loss;
}

double DdpgAgent::actor_update(const NetworkBatch& batch) {
  grad_scratch_.assign(actor_.parameter_count(), 0.0);
  const double objective =
      actor_objective_gradient(actor_, critic_, batch, hyper_.action_l2, grad_scratch_);
  require_finite(objective, "actor objective");
  // Ascent on J is descent on -J.
  for (double& g : grad_scratch_) g = -g;
  actor_opt_.step(actor_.parameters(), grad_scratch_);
  return objective;
}

void DdpgAgent::soft_update_targets() {
  soft_update(target_actor_, actor_, hyper_.tau);
  soft_update(target_critic_, critic_, hyper_.tau);
}

DdpgAgent::StepStats DdpgAgent::train(const TrainingBatch& batch) {
  const NetworkBatch nb = prepare(batch);
  const std::vector<double> y = td_targets(nb);
  StepStats stats;
  stats.critic_loss = critic_update(nb, y);
  stats.actor_objective = actor_update(nb);
  soft_update_targets();
  return stats;
}

}  // namespace tactile
