#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>

#include "tactile/env.hpp"

// Deterministic planar contact physics behind the three task analogs.
//
// Push and Slide live in the horizontal table plane (x, y): a disc effector
// pushes a disc object that slides with Coulomb friction. Lift lives in the
// vertical plane (x, z): two disc fingers straddle the effector, the object is
// an axis-aligned square resting on the table under gravity, and grasping is
// a latch rather than simulated finger friction.
namespace tactile {

using Vec2 = std::array<double, 2>;

struct Region {
  Vec2 lo{};
  Vec2 hi{};

  Vec2 center() const { return {(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2}; }
  // Same center, extents multiplied by `factor`.
  Region scaled(double factor) const;
  Region inflated(double margin) const;
  bool contains(const Vec2& p) const;
  bool contains(const Region& other) const;
  Vec2 clamp(const Vec2& p) const;
  Vec2 sample(std::mt19937_64& rng) const;

  friend bool operator==(const Region&, const Region&) = default;
};

struct PhysicsState {
  Vec2 eff_pos{};
  Vec2 eff_vel{};
  Vec2 obj_pos{};
  Vec2 obj_vel{};
  // Lift only.
  double aperture = 0.0;
  bool latched = false;
  Vec2 grasp_offset{};

  friend bool operator==(const PhysicsState&, const PhysicsState&) = default;
};

struct PhysicsConfig {
  Task task = Task::Push;

  double dt = 0.02;       // integration step (s)
  int substeps = 2;       // integration steps per control step
  double k_n = 1000.0;    // contact stiffness (N/m)
  double mu = 0.3;        // kinetic friction, object vs table
  double m_obj = 0.5;     // kg
  double gravity = 9.81;  // m/s^2

  double m_eff = 1.0;         // kg
  double eff_damping = 10.0;  // N s/m, viscous drag on the effector
  double max_force = 5.0;     // N, force at |action| = 1

  double eff_radius = 0.02;   // effector disc (Push/Slide)
  double obj_radius = 0.025;  // object disc (Push/Slide) or square half-size (Lift)

  Region eff_workspace;
  Region obj_bounds;
  Region eff_start;
  Region obj_start;

  // Hard goal region; Simple and Intermediate shrink it about its center.
  Region goal_hard;
  double simple_scale = 0.5;
  double intermediate_scale = 0.75;

  // Lift gripper.
  double aperture_max = 0.08;
  double finger_radius = 0.01;
  double grip_speed = 0.15;      // m/s at |command| = 1
  double grasp_threshold = 1.0;  // N per finger to engage the latch

  static PhysicsConfig defaults(Task task);

  // Throws ConfigError naming the offending field.
  void validate() const;
  Region goal_region(Difficulty level) const;
};

// Per-contact breakdown. `on_object` is the total contact force applied to the
// object; the effector receives exactly its negation.
struct ContactForces {
  Vec2 on_object{};
  double left = 0.0;   // finger force magnitudes (Lift); left carries the disc force otherwise
  double right = 0.0;
  double magnitude = 0.0;  // left + right, the tactile reading
};

// Penetration depth (>= 0) between two discs.
double disc_disc_overlap(const Vec2& a, double ra, const Vec2& b, double rb);
// Penetration depth (>= 0) of a disc into an axis-aligned square.
double disc_box_overlap(const Vec2& center, double radius, const Vec2& box_center,
                        double half_size);

// Finger disc centers for Lift, ordered (left, right).
std::array<Vec2, 2> finger_centers(const PhysicsState& state, const PhysicsConfig& config);

ContactForces contact_forces(const PhysicsState& state, const PhysicsConfig& config);
// k_n * overlap, summed over fingers for Lift. Always >= 0.
double contact_force(const PhysicsState& state, const PhysicsConfig& config);

// One semi-implicit Euler step of length config.dt. Throws SimulationError if
// the result is not finite.
PhysicsState integrate(const PhysicsState& state, std::span<const double> action,
                       const PhysicsConfig& config);

Goal sample_goal(Difficulty level, const PhysicsConfig& config, std::mt19937_64& rng);

// Set of goals no quasi-static push can realize: the object center can only be
// held where the effector, clamped to its workspace, still touches it.
class ReachabilityPredicate {
 public:
  explicit ReachabilityPredicate(Region reachable) : reachable_(reachable) {}
  // True iff the goal lies strictly outside the reachable region.
  bool operator()(const Goal& goal) const;
  const Region& reachable() const { return reachable_; }

 private:
  Region reachable_;
};

ReachabilityPredicate slide_reachability(const PhysicsConfig& config);

}  // namespace tactile
