#include "tactile/replay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tactile/errors.hpp"

namespace tactile {

double Episode::total_reward() const {
  double sum = 0.0;
  for (const Transition& tr : transitions) sum += tr.reward;
  return sum;
}

std::optional<int> find_contact_onset(const Episode& episode, double eps_force) {
  for (int t = 0; t < episode.length(); ++t)
    if (contact_threshold_reached(episode.transitions[t].force_sum_next, eps_force)) return t;
  return std::nullopt;
}

double recompute_hindsight(const Transition& transition, const Goal& new_goal,
                           const RewardParams& params) {
  if (std::isnan(transition.force_sum_next))
    throw DataError("transition has no recorded force_sum");
  return combined_reward(transition.achieved_next, new_goal, transition.force_sum_next, params);
}

EpisodeBuffer::EpisodeBuffer(std::size_t capacity, int horizon, double eps_force, double lambda)
    : capacity_(capacity), horizon_(horizon), eps_force_(eps_force), lambda_(lambda) {
  if (capacity == 0) throw ConfigError("replay.capacity: must be >= 1");
  if (horizon < 1) throw ConfigError("replay.horizon: must be >= 1");
  if (!(eps_force > 0.0)) throw ConfigError("replay.eps_force: must be > 0");
  set_lambda(lambda);
}

void EpisodeBuffer::set_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("replay.lambda: must be > 0");
  lambda_ = lambda;
}

void EpisodeBuffer::push(Episode episode) {
  if (episode.length() != horizon_)
    throw DataError("episode has " + std::to_string(episode.length()) + " transitions, expected " +
                    std::to_string(horizon_));
  for (const Transition& tr : episode.transitions) {
    if (std::isnan(tr.force_sum_next) || tr.force_sum_next != tr.next_obs.force_sum)
      throw DataError("transition force_sum_next disagrees with next_obs.force_sum");
    if (tr.achieved_next != tr.next_obs.achieved(tr.achieved_next.dim()))
      throw DataError("transition achieved_next disagrees with next_obs object position");
  }
  episode.t_force = find_contact_onset(episode, eps_force_);
  episode.id = next_id_++;
  episodes_.push_back(std::move(episode));
  while (episodes_.size() > capacity_) episodes_.pop_front();
}

double EpisodeBuffer::episode_weight(std::size_t i) const {
  const auto& tf = episodes_[i].t_force;
  if (!tf) return static_cast<double>(horizon_);
  return static_cast<double>(*tf) + static_cast<double>(horizon_ - *tf) * lambda_;
}

TransitionWeights transition_weights(const EpisodeBuffer& buffer) {
  if (buffer.empty()) throw UsageError("transition_weights: buffer is empty");
  const std::size_t T = static_cast<std::size_t>(buffer.horizon());
  TransitionWeights w{Matrix(buffer.size(), T, 1.0), 0.0};
  for (std::size_t e = 0; e < buffer.size(); ++e) {
    const auto& tf = buffer[e].t_force;
    if (tf)
      for (std::size_t t = static_cast<std::size_t>(*tf); t < T; ++t) w.weights(e, t) = buffer.lambda();
  }
  for (double v : w.weights.flat()) w.total += v;
  return w;
}

std::vector<double> episode_marginal(const TransitionWeights& weights) {
  std::vector<double> p(weights.weights.rows(), 0.0);
  for (std::size_t e = 0; e < p.size(); ++e) {
    double row = 0.0;
    for (double v : weights.weights.row(e)) row += v;
    p[e] = row / weights.total;
  }
  return p;
}

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::UniformHer: return "uniform_her";
    case SamplerKind::Cper: return "cper";
    case SamplerKind::EpisodeAblation: return "episode_ablation";
    case SamplerKind::RewardPrioritized: return "reward_prioritized";
  }
  return "?";
}

namespace {

double unit(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Categorical draw over episodes via prefix sums.
class EpisodePicker {
 public:
  explicit EpisodePicker(std::vector<double> weights) : prefix_(std::move(weights)) {
    std::partial_sum(prefix_.begin(), prefix_.end(), prefix_.begin());
  }
  std::size_t pick(std::mt19937_64& rng) const {
    const double u = unit(rng) * prefix_.back();
    const auto it = std::upper_bound(prefix_.begin(), prefix_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - prefix_.begin()), prefix_.size() - 1);
  }

 private:
  std::vector<double> prefix_;
};

EpisodePicker contact_picker(const EpisodeBuffer& buffer) {
  std::vector<double> w(buffer.size());
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = buffer.episode_weight(e);
  return EpisodePicker(std::move(w));
}

// Draw from the within-episode conditional: weight 1 before the onset,
// lambda from the onset on.
int draw_prioritized_step(const Episode& ep, int horizon, double lambda, std::mt19937_64& rng) {
  const int onset = ep.t_force.value_or(horizon);
  const double total = onset + (horizon - onset) * lambda;
  const double u = unit(rng) * total;
  int t = u < onset ? static_cast<int>(u) : onset + static_cast<int>((u - onset) / lambda);
  return std::clamp(t, 0, horizon - 1);
}

void check_sampling(const EpisodeBuffer& buffer, const SamplerSettings& settings) {
  if (buffer.empty()) throw UsageError("cannot sample from an empty replay buffer");
  if (!(settings.hindsight_prob >= 0.0 && settings.hindsight_prob <= 1.0))
    throw ConfigError("sampler.hindsight_prob: must be in [0, 1]");
}

MiniBatchItem make_item(const EpisodeBuffer& buffer, std::size_t e, int t, int t_goal,
                        bool hindsight, const RewardParams& params) {
  const Episode& ep = buffer[e];
  const Transition& tr = ep.transitions[static_cast<std::size_t>(t)];
  MiniBatchItem item;
  item.source = &tr;
  item.episode = e;
  item.t = t;
  item.t_goal = t_goal;
  item.hindsight = hindsight;
  if (hindsight) {
    item.goal = ep.transitions[static_cast<std::size_t>(t_goal)].achieved_next;
    item.reward = recompute_hindsight(tr, item.goal, params);
  } else {
    item.goal = tr.goal;
    item.reward = tr.reward;
  }
  return item;
}

// Goal step first (by `draw_goal`), then a training step uniformly at or
// before it.
template <typename DrawGoal>
std::vector<MiniBatchItem> sample_backward(const EpisodeBuffer& buffer, const EpisodePicker& picker,
                                           const SamplerSettings& settings,
                                           const RewardParams& params, std::mt19937_64& rng,
                                           DrawGoal draw_goal) {
  std::vector<MiniBatchItem> batch;
  batch.reserve(settings.batch_size);
  std::bernoulli_distribution coin(settings.hindsight_prob);
  for (std::size_t b = 0; b < settings.batch_size; ++b) {
    const std::size_t e = picker.pick(rng);
    const int t_goal = draw_goal(buffer[e]);
    const int t = uniform_int(rng, 0, t_goal);
    const bool hindsight = coin(rng);
    batch.push_back(make_item(buffer, e, t, t_goal, hindsight, params));
  }
  return batch;
}

// Training step uniform, goal step from the "future" of it.
std::vector<MiniBatchItem> sample_forward(const EpisodeBuffer& buffer, const EpisodePicker* picker,
                                          const SamplerSettings& settings,
                                          const RewardParams& params, std::mt19937_64& rng) {
  std::vector<MiniBatchItem> batch;
  batch.reserve(settings.batch_size);
  std::bernoulli_distribution coin(settings.hindsight_prob);
  const int T = buffer.horizon();
  const int last_episode = static_cast<int>(buffer.size()) - 1;
  for (std::size_t b = 0; b < settings.batch_size; ++b) {
    const std::size_t e =
        picker ? picker->pick(rng) : static_cast<std::size_t>(uniform_int(rng, 0, last_episode));
    const int t = uniform_int(rng, 0, T - 1);
    const bool hindsight = coin(rng);
    const int t_goal = hindsight ? uniform_int(rng, t, T - 1) : -1;
    batch.push_back(make_item(buffer, e, t, t_goal, hindsight, params));
  }
  return batch;
}

}  // namespace

std::vector<MiniBatchItem> sample_cper(const EpisodeBuffer& buffer, const SamplerSettings& settings,
                                       const RewardParams& params, std::mt19937_64& rng) {
  check_sampling(buffer, settings);
  const EpisodePicker picker = contact_picker(buffer);
  const int T = buffer.horizon();
  const double lambda = buffer.lambda();
  return sample_backward(buffer, picker, settings, params, rng, [&](const Episode& ep) {
    return draw_prioritized_step(ep, T, lambda, rng);
  });
}

std::vector<MiniBatchItem> sample_episode_ablation(const EpisodeBuffer& buffer,
                                                   const SamplerSettings& settings,
                                                   const RewardParams& params,
                                                   std::mt19937_64& rng) {
  check_sampling(buffer, settings);
  const EpisodePicker picker = contact_picker(buffer);
  const int T = buffer.horizon();
  return sample_backward(buffer, picker, settings, params, rng,
                         [&](const Episode&) { return uniform_int(rng, 0, T - 1); });
}

std::vector<MiniBatchItem> sample_uniform_her(const EpisodeBuffer& buffer,
                                              const SamplerSettings& settings,
                                              const RewardParams& params, std::mt19937_64& rng) {
  check_sampling(buffer, settings);
  return sample_forward(buffer, nullptr, settings, params, rng);
}

std::vector<MiniBatchItem> sample_reward_prioritized(const EpisodeBuffer& buffer,
                                                     const SamplerSettings& settings,
                                                     const RewardParams& params,
                                                     std::mt19937_64& rng) {
  check_sampling(buffer, settings);
  std::vector<double> w(buffer.size());
  for (std::size_t e = 0; e < w.size(); ++e) w[e] = 1.0 + buffer[e].total_reward();
  const EpisodePicker picker(std::move(w));
  return sample_forward(buffer, &picker, settings, params, rng);
}

std::vector<MiniBatchItem> sample_batch(SamplerKind kind, const EpisodeBuffer& buffer,
                                        const SamplerSettings& settings,
                                        const RewardParams& params, std::mt19937_64& rng) {
  switch (kind) {
    case SamplerKind::UniformHer: return sample_uniform_her(buffer, settings, params, rng);
    case SamplerKind::Cper: return sample_cper(buffer, settings, params, rng);
    case SamplerKind::EpisodeAblation: return sample_episode_ablation(buffer, settings, params, rng);
    case SamplerKind::RewardPrioritized:
      return sample_reward_prioritized(buffer, settings, params, rng);
  }
  throw ConfigError("unknown sampler kind");
}

}  // namespace tactile
