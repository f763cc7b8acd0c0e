#pragma once

#include <memory>
#include <random>

#include "tactile/env.hpp"
#include "tactile/physics.hpp"

namespace tactile {

// One environment class covers the three tasks; the task is carried by the
// physics config. Observation blocks:
//   Push/Slide  proprio = [eff x, eff y, eff vx, eff vy]
//               object  = [obj x, obj y, obj vx, obj vy, obj x - eff x, obj y - eff y]
//   Lift        proprio = [eff x, eff z, eff vx, eff vz, aperture, f_left, f_right]
//               object  = [obj x, obj z, obj vx, obj vz, obj x - eff x, obj z - eff z]
class PlanarEnv final : public Env {
 public:
  struct Snapshot {
    PhysicsState physics;
    Goal goal;
    double force_sum = 0.0;
    int step = 0;
    bool ready = false;
  };

  PlanarEnv(PhysicsConfig physics, EnvConfig env = {});

  std::pair<Observation, Goal> reset(Difficulty level, std::uint64_t seed) override;
  StepOutcome step(std::span<const double> action) override;

  Task task() const override { return physics_.task; }
  const ObservationLayout& layout() const override { return layout_; }
  std::size_t action_dim() const override { return physics_.task == Task::Lift ? 3 : 2; }
  const EnvConfig& env_config() const override { return env_; }
  int steps_taken() const override { return snap_.step; }

  const PhysicsConfig& physics_config() const { return physics_; }
  const PhysicsState& physics_state() const { return snap_.physics; }
  const Goal& goal() const { return snap_.goal; }
  Observation observe(double force_now) const;

  Snapshot snapshot() const { return snap_; }
  void restore(const Snapshot& s) { snap_ = s; }

 private:
  PhysicsConfig physics_;
  EnvConfig env_;
  ObservationLayout layout_;
  Snapshot snap_;
};

ObservationLayout layout_for(Task task);
std::unique_ptr<PlanarEnv> make_env(Task task);

}  // namespace tactile
