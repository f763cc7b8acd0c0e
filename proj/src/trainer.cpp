#include "tactile/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "tactile/checkpoint.hpp"
#include "tactile/errors.hpp"

namespace tactile {

namespace {

enum Stream : std::uint64_t { kAgentInit = 1, kTrainRng = 2, kTrainEnv = 3, kEval = 4 };

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

AgentDims dims_for(const ExperimentConfig& c) {
  const ObservationLayout layout = layout_for(c.task);
  return AgentDims{layout.size(c.tactile_in_state()), layout.goal_dim,
                   c.task == Task::Lift ? std::size_t{3} : std::size_t{2}};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index);
}

Episode collect_episode(Env& env, const Observation& first, const Goal& goal, const Policy& policy,
                        const RewardParams& params) {
  const int T = env.horizon();
  const std::size_t goal_dim = env.layout().goal_dim;
  Episode ep;
  ep.transitions.reserve(static_cast<std::size_t>(T));
  Observation obs = first;
  for (int t = 0; t < T; ++t) {
    Transition tr;
    tr.obs = obs;
    tr.goal = goal;
    if (!ep.failed) {
      try {
        tr.action = clamp_action(policy(obs, goal));
        StepOutcome out = env.step(tr.action);
        tr.next_obs = std::move(out.next_obs);
        tr.achieved_next = std::move(out.achieved);
      } catch (const SimulationError&) {
        ep.failed = true;
      }
    }
    if (ep.failed) {
      // Frozen padding keeps the fixed episode length.
      tr.action.assign(env.action_dim(), 0.0);
      tr.next_obs = obs;
      tr.next_obs.force_now = 0.0;
      tr.achieved_next = obs.achieved(goal_dim);
    }
    tr.force_sum_next = tr.next_obs.force_sum;
    tr.reward = combined_reward(tr.achieved_next, goal, tr.force_sum_next, params);
    obs = tr.next_obs;
    ep.transitions.push_back(std::move(tr));
  }
  return ep;
}

bool episode_success(const Episode& episode, double eps_pos) {
  if (episode.transitions.empty()) return false;
  const Transition& last = episode.transitions.back();
  return is_success(last.achieved_next, last.goal, eps_pos);
}

Trainer::Trainer(ExperimentConfig config)
    : config_((config.validate(), std::move(config))),
      reward_(config_.effective_reward()),
      env_(std::make_unique<PlanarEnv>(config_.physics, config_.env)),
      agent_(dims_for(config_), config_.effective_ddpg(), derive_seed(config_.seed, kAgentInit)),
      buffer_(config_.buffer_episodes, config_.env.horizon, config_.reward.eps_force, config_.lambda),
      rng_(derive_seed(config_.seed, kTrainRng)) {}

std::vector<double> Trainer::features(const Observation& obs) const {
  return obs.flatten(env_->layout(), config_.tactile_in_state());
}

Policy Trainer::greedy_policy() const {
  return [this](const Observation& obs, const Goal& goal) {
    return agent_.act(features(obs), goal.position);
  };
}

Policy Trainer::exploration_policy() {
  return [this](const Observation& obs, const Goal& goal) {
    return agent_.explore(features(obs), goal.position, rng_);
  };
}

void Trainer::observe_episode(const Episode& ep) {
  const ObservationLayout& layout = env_->layout();
  const bool tactile = config_.tactile_in_state();
  const std::size_t T = ep.transitions.size();
  Matrix obs(T + 1, layout.size(tactile));
  Matrix goals(2 * T, layout.goal_dim);
  std::vector<double> row;
  for (std::size_t t = 0; t <= T; ++t) {
    row.clear();
    const Observation& o = t < T ? ep.transitions[t].obs : ep.transitions[T - 1].next_obs;
    o.append_to(row, layout, tactile);
    std::copy(row.begin(), row.end(), obs.row(t).begin());
  }
  for (std::size_t t = 0; t < T; ++t) {
    const auto& g = ep.transitions[t].goal.position;
    const auto& a = ep.transitions[t].achieved_next.position;
    std::copy(g.begin(), g.end(), goals.row(2 * t).begin());
    std::copy(a.begin(), a.end(), goals.row(2 * t + 1).begin());
  }
  agent_.update_normalizers(obs, goals);
}

TrainingBatch Trainer::assemble(const std::vector<MiniBatchItem>& items) const {
  const ObservationLayout& layout = env_->layout();
  const bool tactile = config_.tactile_in_state();
  const AgentDims& d = agent_.dims();
  const std::size_t n = items.size();
  TrainingBatch b{Matrix(n, d.obs), Matrix(n, d.goal), Matrix(n, d.action), Matrix(n, d.obs),
                  std::vector<double>(n)};
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    const Transition& tr = *items[i].source;
    row.clear();
    tr.obs.append_to(row, layout, tactile);
    std::copy(row.begin(), row.end(), b.obs.row(i).begin());
    row.clear();
    tr.next_obs.append_to(row, layout, tactile);
    std::copy(row.begin(), row.end(), b.next_obs.row(i).begin());
    std::copy(items[i].goal.position.begin(), items[i].goal.position.end(), b.goal.row(i).begin());
    std::copy(tr.action.begin(), tr.action.end(), b.action.row(i).begin());
    b.reward[i] = items[i].reward;
  }
  return b;
}

double Trainer::evaluate(const Policy& policy, int episodes, std::uint64_t seed_stream) {
  if (episodes <= 0) return 0.0;
  int successes = 0;
  for (int i = 0; i < episodes; ++i) {
    auto [obs, goal] = env_->reset(config_.difficulty, derive_seed(seed_stream, 0, static_cast<std::uint64_t>(i)));
    const Episode ep = collect_episode(*env_, obs, goal, policy, reward_);
    successes += episode_success(ep, config_.env.eps_pos) ? 1 : 0;
  }
  return static_cast<double>(successes) / episodes;
}

MetricsRow Trainer::run_epoch() {
  const auto start = std::chrono::steady_clock::now();
  MetricsRow row;
  row.epoch = epoch_;
  const SamplerSettings sampler{config_.ddpg.batch_size, config_.hindsight_prob};
  const Policy explore = exploration_policy();

  int successes = 0;
  double reward_sum = 0.0;
  double onset_sum = 0.0;
  int onsets = 0;
  for (int k = 0; k < config_.episodes_per_epoch; ++k) {
    auto [obs, goal] = env_->reset(config_.difficulty,
                                   derive_seed(config_.seed, kTrainEnv, episodes_collected_++));
    Episode ep = collect_episode(*env_, obs, goal, explore, reward_);
    successes += episode_success(ep, config_.env.eps_pos) ? 1 : 0;
    reward_sum += ep.total_reward();
    if (const auto onset = find_contact_onset(ep, config_.reward.eps_force)) {
      onset_sum += *onset;
      ++onsets;
    }
    observe_episode(ep);
    buffer_.push(std::move(ep));

    for (int s = 0; s < config_.optimizer_steps_per_episode; ++s) {
      const auto items = sample_batch(config_.sampler(), buffer_, sampler, reward_, rng_);
      try {
        agent_.train(assemble(items));
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " [" + run_name(config_) + ", epoch " +
                            std::to_string(epoch_) + ", config hash " +
                            std::to_string(config_hash(config_)) + "]");
      }
    }
  }
  row.train_success = static_cast<double>(successes) / config_.episodes_per_epoch;
  row.mean_reward = reward_sum / config_.episodes_per_epoch;
  row.onset_step = onsets > 0 ? onset_sum / onsets : -1.0;
  row.eval_success = evaluate(greedy_policy(), config_.eval_episodes,
                              derive_seed(config_.seed, kEval, static_cast<std::uint64_t>(epoch_)));
  if (config_.record_wall_clock)
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ++epoch_;
  return row;
}

void write_metrics_header(std::ostream& out) {
  out << "epoch,train_success,eval_success,mean_reward,onset_step,seconds\n";
}

void write_metrics_row(std::ostream& out, const MetricsRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f,%.3f\n", r.epoch, r.train_success,
                r.eval_success, r.mean_reward, r.onset_step, r.seconds);
  out << buf;
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("epoch,", 0) != 0)
    throw DataError(path.string() + ": missing metrics header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    MetricsRow r;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf", &r.epoch, &r.train_success,
                    &r.eval_success, &r.mean_reward, &r.onset_step, &r.seconds) != 6)
      throw DataError(path.string() + ": malformed metrics row '" + line + "'");
    rows.push_back(r);
  }
  return rows;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  Trainer trainer(config);
  std::ofstream metrics, timing;
  if (options.output_dir) {
    std::filesystem::create_directories(*options.output_dir);
    save_config(config, *options.output_dir / "config.json");
    metrics.open(*options.output_dir / "metrics.csv");
    timing.open(*options.output_dir / "timing.csv");
    if (!metrics || !timing) throw DataError("cannot write into " + options.output_dir->string());
    write_metrics_header(metrics);
    timing << "epoch,seconds\n";
  }
  std::vector<MetricsRow> rows;
  for (int e = 0; e < config.epochs; ++e) {
    const auto start = std::chrono::steady_clock::now();
    MetricsRow row = trainer.run_epoch();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(row);
    if (options.output_dir) {
      write_metrics_row(metrics, row);
      metrics.flush();
      timing << row.epoch << ',' << secs << '\n';
    }
    if (options.stop && options.stop(row)) break;
  }
  if (options.output_dir) save_checkpoint(trainer.agent(), *options.output_dir / "checkpoint.bin");
  return rows;
}

}  // namespace tactile
