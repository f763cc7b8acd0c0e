#include "tactile/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "tactile/errors.hpp"

namespace tactile {

using nlohmann::json;

ArmSettings arm_settings(Arm arm) {
  switch (arm) {
    case Arm::Her: return {SamplerKind::UniformHer, false, false};
    case Arm::HerTactile: return {SamplerKind::UniformHer, true, false};
    case Arm::Ir: return {SamplerKind::UniformHer, true, true};
    case Arm::Cper: return {SamplerKind::Cper, true, false};
    case Arm::CperIr: return {SamplerKind::Cper, true, true};
    case Arm::EpisodeAblation: return {SamplerKind::EpisodeAblation, true, true};
    case Arm::RewardPrioritized: return {SamplerKind::RewardPrioritized, true, true};
  }
  throw ConfigError("unknown arm");
}

std::string_view to_string(Arm arm) {
  switch (arm) {
    case Arm::Her: return "her";
    case Arm::HerTactile: return "her_tactile";
    case Arm::Ir: return "ir";
    case Arm::Cper: return "cper";
    case Arm::CperIr: return "cper_ir";
    case Arm::EpisodeAblation: return "episode_ablation";
    case Arm::RewardPrioritized: return "reward_prioritized";
  }
  return "?";
}

Arm parse_arm(std::string_view name) {
  std::string n;
  for (char c : name) {
    if (c == '(' || c == ')' || c == ' ') continue;
    n.push_back(c == '+' || c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  static const std::map<std::string, Arm> names{
      {"her", Arm::Her},
      {"uniformher", Arm::Her},
      {"her_tactile", Arm::HerTactile},
      {"hertactile", Arm::HerTactile},
      {"uniformher_tactile", Arm::HerTactile},
      {"ir", Arm::Ir},
      {"cper", Arm::Cper},
      {"cper_ir", Arm::CperIr},
      {"episode_ablation", Arm::EpisodeAblation},
      {"episodeablation", Arm::EpisodeAblation},
      {"episode_sampling", Arm::EpisodeAblation},
      {"reward_prioritized", Arm::RewardPrioritized},
      {"rewardprioritized", Arm::RewardPrioritized},
      {"reward_prioritization", Arm::RewardPrioritized},
  };
  const auto it = names.find(n);
  if (it == names.end())
    throw ConfigError("unknown arm '" + std::string(name) +
                      "' (expected her, her_tactile, ir, cper, cper_ir, episode_ablation or "
                      "reward_prioritized)");
  return it->second;
}

ExperimentConfig ExperimentConfig::defaults(Task task) {
  ExperimentConfig c;
  c.task = task;
  c.physics = PhysicsConfig::defaults(task);
  c.reward = RewardParams::for_task(task);
  c.env.eps_pos = c.reward.eps_pos;
  return c;
}

RewardParams ExperimentConfig::effective_reward() const {
  return arm_settings(arm).intrinsic_reward ? reward : reward.extrinsic_only();
}

DdpgHyper ExperimentConfig::effective_ddpg() const {
  DdpgHyper h = ddpg;
  h.q_clip_low = 0.0;
  h.q_clip_high = effective_reward().max_reward() / (1.0 - h.gamma);
  return h;
}

void ExperimentConfig::validate() const {
  if (physics.task != task) throw ConfigError("physics.task: must match task");
  physics.validate();
  reward.validate();
  ddpg.validate();
  if (env.horizon < 1) throw ConfigError("env.horizon: must be >= 1");
  if (env.eps_pos != reward.eps_pos) throw ConfigError("env.eps_pos: must equal reward.eps_pos");
  if (!(lambda > 0.0)) throw ConfigError("lambda: must be > 0");
  if (!(hindsight_prob >= 0.0 && hindsight_prob <= 1.0))
    throw ConfigError("hindsight_prob: must be in [0, 1]");
  if (buffer_episodes == 0) throw ConfigError("buffer_episodes: must be >= 1");
  if (epochs < 0) throw ConfigError("epochs: must be >= 0");
  if (episodes_per_epoch < 1) throw ConfigError("episodes_per_epoch: must be >= 1");
  if (optimizer_steps_per_episode < 0) throw ConfigError("optimizer_steps_per_episode: must be >= 0");
  if (eval_episodes < 0) throw ConfigError("eval_episodes: must be >= 0");
}

namespace {

json region_json(const Region& r) { return json::array({{r.lo[0], r.lo[1]}, {r.hi[0], r.hi[1]}}); }

Region region_from(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() ||
      j[1].size() != 2)
    throw json::type_error::create(302, "expected [[lo_x, lo_y], [hi_x, hi_y]]", &j);
  return Region{{j[0][0].get<double>(), j[0][1].get<double>()},
                {j[1][0].get<double>(), j[1][1].get<double>()}};
}

using Setter = std::function<void(const json&)>;

// Applies `setters` to the members of `j`, reporting the JSON path of any
// unknown field or type error.
void apply(const json& j, const std::string& path, const std::map<std::string, Setter>& setters) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string field = path.empty() ? key : path + "." + key;
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(field + ": unknown field");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw ConfigError(field + ": " + e.what());
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      if (what.rfind(field, 0) == 0) throw;
      throw ConfigError(field + ": " + what);
    }
  }
}

template <typename T>
Setter set(T& target) {
  return [&target](const json& v) { target = v.get<T>(); };
}

Setter set_region(Region& target) {
  return [&target](const json& v) { target = region_from(v); };
}

}  // namespace

json to_json(const ExperimentConfig& c) {
  const PhysicsConfig& p = c.physics;
  return json{
      {"task", to_string(c.task)},
      {"difficulty", to_string(c.difficulty)},
      {"arm", to_string(c.arm)},
      {"tactile_in_state", c.tactile_in_state()},
      {"seed", c.seed},
      {"epochs", c.epochs},
      {"episodes_per_epoch", c.episodes_per_epoch},
      {"optimizer_steps_per_episode", c.optimizer_steps_per_episode},
      {"eval_episodes", c.eval_episodes},
      {"lambda", c.lambda},
      {"hindsight_prob", c.hindsight_prob},
      {"buffer_episodes", c.buffer_episodes},
      {"record_wall_clock", c.record_wall_clock},
      {"env", {{"horizon", c.env.horizon}}},
      {"reward",
       {{"w_ext", c.reward.w_ext},
        {"w_int", c.reward.w_int},
        {"eps_pos", c.reward.eps_pos},
        {"eps_force", c.reward.eps_force}}},
      {"physics",
       {{"dt", p.dt},
        {"substeps", p.substeps},
        {"k_n", p.k_n},
        {"mu", p.mu},
        {"m_obj", p.m_obj},
        {"gravity", p.gravity},
        {"m_eff", p.m_eff},
        {"eff_damping", p.eff_damping},
        {"max_force", p.max_force},
        {"eff_radius", p.eff_radius},
        {"obj_radius", p.obj_radius},
        {"eff_workspace", region_json(p.eff_workspace)},
        {"obj_bounds", region_json(p.obj_bounds)},
        {"eff_start", region_json(p.eff_start)},
        {"obj_start", region_json(p.obj_start)},
        {"goal_hard", region_json(p.goal_hard)},
        {"simple_scale", p.simple_scale},
        {"intermediate_scale", p.intermediate_scale},
        {"aperture_max", p.aperture_max},
        {"finger_radius", p.finger_radius},
        {"grip_speed", p.grip_speed},
        {"grasp_threshold", p.grasp_threshold}}},
      {"ddpg",
       {{"hidden", c.ddpg.hidden},
        {"gamma", c.ddpg.gamma},
        {"tau", c.ddpg.tau},
        {"lr_actor", c.ddpg.lr_actor},
        {"lr_critic", c.ddpg.lr_critic},
        {"optimizer", to_string(c.ddpg.optimizer)},
        {"noise_sigma", c.ddpg.noise_sigma},
        {"random_eps", c.ddpg.random_eps},
        {"batch_size", c.ddpg.batch_size},
        {"action_l2", c.ddpg.action_l2},
        {"obs_clip", c.ddpg.obs_clip}}},
  };
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  Task task = Task::Push;
  if (j.contains("task")) {
    if (!j["task"].is_string()) throw ConfigError("task: expected a string");
    task = parse_task(j["task"].get<std::string>());
  }
  ExperimentConfig c = ExperimentConfig::defaults(task);
  std::optional<bool> tactile_flag;
  PhysicsConfig& p = c.physics;

  const std::map<std::string, Setter> physics{
      {"dt", set(p.dt)},
      {"substeps", set(p.substeps)},
      {"k_n", set(p.k_n)},
      {"mu", set(p.mu)},
      {"m_obj", set(p.m_obj)},
      {"gravity", set(p.gravity)},
      {"m_eff", set(p.m_eff)},
      {"eff_damping", set(p.eff_damping)},
      {"max_force", set(p.max_force)},
      {"eff_radius", set(p.eff_radius)},
      {"obj_radius", set(p.obj_radius)},
      {"eff_workspace", set_region(p.eff_workspace)},
      {"obj_bounds", set_region(p.obj_bounds)},
      {"eff_start", set_region(p.eff_start)},
      {"obj_start", set_region(p.obj_start)},
      {"goal_hard", set_region(p.goal_hard)},
      {"simple_scale", set(p.simple_scale)},
      {"intermediate_scale", set(p.intermediate_scale)},
      {"aperture_max", set(p.aperture_max)},
      {"finger_radius", set(p.finger_radius)},
      {"grip_speed", set(p.grip_speed)},
      {"grasp_threshold", set(p.grasp_threshold)},
  };
  const std::map<std::string, Setter> reward{
      {"w_ext", set(c.reward.w_ext)},
      {"w_int", set(c.reward.w_int)},
      {"eps_pos", set(c.reward.eps_pos)},
      {"eps_force", set(c.reward.eps_force)},
  };
  const std::map<std::string, Setter> ddpg{
      {"hidden", set(c.ddpg.hidden)},
      {"gamma", set(c.ddpg.gamma)},
      {"tau", set(c.ddpg.tau)},
      {"lr_actor", set(c.ddpg.lr_actor)},
      {"lr_critic", set(c.ddpg.lr_critic)},
      {"optimizer", [&](const json& v) { c.ddpg.optimizer = parse_optimizer(v.get<std::string>()); }},
      {"noise_sigma", set(c.ddpg.noise_sigma)},
      {"random_eps", set(c.ddpg.random_eps)},
      {"batch_size", set(c.ddpg.batch_size)},
      {"action_l2", set(c.ddpg.action_l2)},
      {"obs_clip", set(c.ddpg.obs_clip)},
  };
  const std::map<std::string, Setter> env{{"horizon", set(c.env.horizon)}};
  const std::map<std::string, Setter> top{
      {"task", [](const json&) {}},
      {"difficulty", [&](const json& v) { c.difficulty = parse_difficulty(v.get<std::string>()); }},
      {"arm", [&](const json& v) { c.arm = parse_arm(v.get<std::string>()); }},
      {"sampler", [&](const json& v) { c.arm = parse_arm(v.get<std::string>()); }},
      {"tactile_in_state", [&](const json& v) { tactile_flag = v.get<bool>(); }},
      {"seed", set(c.seed)},
      {"epochs", set(c.epochs)},
      {"episodes_per_epoch", set(c.episodes_per_epoch)},
      {"optimizer_steps_per_episode", set(c.optimizer_steps_per_episode)},
      {"eval_episodes", set(c.eval_episodes)},
      {"lambda", set(c.lambda)},
      {"hindsight_prob", set(c.hindsight_prob)},
      {"buffer_episodes", set(c.buffer_episodes)},
      {"record_wall_clock", set(c.record_wall_clock)},
      {"env", [&](const json& v) { apply(v, "env", env); }},
      {"reward", [&](const json& v) { apply(v, "reward", reward); }},
      {"physics", [&](const json& v) { apply(v, "physics", physics); }},
      {"ddpg", [&](const json& v) { apply(v, "ddpg", ddpg); }},
  };
  apply(j, "", top);
  if (tactile_flag && *tactile_flag != c.tactile_in_state())
    throw ConfigError("tactile_in_state: arm '" + std::string(to_string(c.arm)) +
                      "' requires tactile_in_state = " + (c.tactile_in_state() ? "true" : "false"));
  c.env.eps_pos = c.reward.eps_pos;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

void save_config(const ExperimentConfig& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_json(config).dump(2) << '\n';
}

std::string run_name(const ExperimentConfig& c) {
  std::ostringstream s;
  s << to_string(c.task) << '-' << to_string(c.difficulty) << '-' << to_string(c.arm) << "-seed"
    << c.seed;
  return s.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : to_json(config).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace tactile
