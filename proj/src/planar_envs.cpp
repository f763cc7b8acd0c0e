#include "tactile/planar_envs.hpp"

#include "tactile/errors.hpp"

namespace tactile {

ObservationLayout layout_for(Task task) {
  if (task == Task::Lift) return ObservationLayout{7, 2, 6, 2};
  return ObservationLayout{4, 0, 6, 2};
}

PlanarEnv::PlanarEnv(PhysicsConfig physics, EnvConfig env)
    : physics_(std::move(physics)), env_(env), layout_(layout_for(physics_.task)) {
  physics_.validate();
  if (env_.horizon < 1) throw ConfigError("env.horizon: must be >= 1");
  if (!(env_.eps_pos > 0.0)) throw ConfigError("env.eps_pos: must be > 0");
}

std::pair<Observation, Goal> PlanarEnv::reset(Difficulty level, std::uint64_t seed) {
  if (level != Difficulty::Simple && level != Difficulty::Intermediate && level != Difficulty::Hard)
    throw ConfigError("unknown difficulty level");
  std::mt19937_64 rng(seed);
  PhysicsState s;
  s.obj_pos = physics_.obj_start.sample(rng);
  // Start out of contact.
  for (int attempt = 0;; ++attempt) {
    s.eff_pos = physics_.eff_start.sample(rng);
    s.aperture = physics_.task == Task::Lift ? physics_.aperture_max : 0.0;
    if (contact_force(s, physics_) == 0.0) break;
    if (attempt > 1000) throw ConfigError("physics.eff_start: cannot place effector out of contact");
  }
  snap_.physics = s;
  snap_.goal = sample_goal(level, physics_, rng);
  snap_.force_sum = 0.0;
  snap_.step = 0;
  snap_.ready = true;
  return {observe(0.0), snap_.goal};
}

StepOutcome PlanarEnv::step(std::span<const double> action) {
  if (!snap_.ready) throw UsageError("step called before reset");
  if (snap_.step >= env_.horizon) throw UsageError("step called past the episode horizon");
  if (action.size() != action_dim()) throw UsageError("action has wrong dimension");
  const Action a = clamp_action(action);
  for (int k = 0; k < physics_.substeps; ++k) snap_.physics = integrate(snap_.physics, a, physics_);
  const double f = contact_force(snap_.physics, physics_);
  snap_.force_sum += f;
  ++snap_.step;
  StepOutcome out;
  out.next_obs = observe(f);
  out.achieved = out.next_obs.achieved(layout_.goal_dim);
  out.force_reading = f;
  return out;
}

Observation PlanarEnv::observe(double force_now) const {
  const PhysicsState& s = snap_.physics;
  Observation o;
  o.proprio = {s.eff_pos[0], s.eff_pos[1], s.eff_vel[0], s.eff_vel[1]};
  if (physics_.task == Task::Lift) {
    const ContactForces f = contact_forces(s, physics_);
    o.proprio.push_back(s.aperture);
    o.proprio.push_back(f.left);
    o.proprio.push_back(f.right);
  }
  o.object = {s.obj_pos[0], s.obj_pos[1], s.obj_vel[0], s.obj_vel[1],
              s.obj_pos[0] - s.eff_pos[0], s.obj_pos[1] - s.eff_pos[1]};
  o.force_now = force_now;
  o.force_sum = snap_.force_sum;
  return o;
}

std::unique_ptr<PlanarEnv> make_env(Task task) {
  return std::make_unique<PlanarEnv>(PhysicsConfig::defaults(task));
}

}  // namespace tactile
