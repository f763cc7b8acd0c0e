#include "tactile/physics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tactile/errors.hpp"

namespace tactile {

namespace {

double norm(const Vec2& v) { return std::hypot(v[0], v[1]); }

bool finite(const Vec2& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); }

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("physics." + field + ": " + what);
}

bool valid_region(const Region& r) { return r.lo[0] <= r.hi[0] && r.lo[1] <= r.hi[1]; }

// Clamps a body into a box, killing the velocity component that pushes outward.
void clamp_body(Vec2& pos, Vec2& vel, const Region& box) {
  for (int k = 0; k < 2; ++k) {
    if (pos[k] < box.lo[k]) {
      pos[k] = box.lo[k];
      vel[k] = std::max(vel[k], 0.0);
    } else if (pos[k] > box.hi[k]) {
      pos[k] = box.hi[k];
      vel[k] = std::min(vel[k], 0.0);
    }
  }
}

// Coulomb friction: removes up to `dv` of speed, never reversing direction.
void apply_friction(Vec2& vel, double dv, int axes = 2) {
  if (axes == 1) {
    const double s = std::abs(vel[0]);
    vel[0] = s > dv ? vel[0] * (s - dv) / s : 0.0;
    return;
  }
  const double s = norm(vel);
  if (s == 0.0) return;
  const double scale = std::max(0.0, s - dv) / s;
  vel[0] *= scale;
  vel[1] *= scale;
}

// Outward normal (from the box toward `center`) and depth for disc vs square.
double disc_box_contact(const Vec2& center, double radius, const Vec2& box_center,
                        double half, Vec2& normal) {
  const Vec2 q{std::clamp(center[0], box_center[0] - half, box_center[0] + half),
               std::clamp(center[1], box_center[1] - half, box_center[1] + half)};
  const Vec2 d{center[0] - q[0], center[1] - q[1]};
  const double dist = norm(d);
  if (dist > 0.0) {
    normal = {d[0] / dist, d[1] / dist};
    return std::max(0.0, radius - dist);
  }
  // Center inside the square: exit through the nearest face.
  const double dx = half - std::abs(center[0] - box_center[0]);
  const double dy = half - std::abs(center[1] - box_center[1]);
  if (dx <= dy) {
    normal = {center[0] >= box_center[0] ? 1.0 : -1.0, 0.0};
    return radius + dx;
  }
  normal = {0.0, center[1] >= box_center[1] ? 1.0 : -1.0};
  return radius + dy;
}

}  // namespace

Region Region::scaled(double factor) const {
  const Vec2 c = center();
  const double hx = (hi[0] - lo[0]) / 2 * factor;
  const double hy = (hi[1] - lo[1]) / 2 * factor;
  return Region{{c[0] - hx, c[1] - hy}, {c[0] + hx, c[1] + hy}};
}

Region Region::inflated(double margin) const {
  return Region{{lo[0] - margin, lo[1] - margin}, {hi[0] + margin, hi[1] + margin}};
}

bool Region::contains(const Vec2& p) const {
  return p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1];
}

bool Region::contains(const Region& other) const {
  return contains(other.lo) && contains(other.hi);
}

Vec2 Region::clamp(const Vec2& p) const {
  return {std::clamp(p[0], lo[0], hi[0]), std::clamp(p[1], lo[1], hi[1])};
}

Vec2 Region::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = u(rng);
  const double b = u(rng);
  return {lo[0] + a * (hi[0] - lo[0]), lo[1] + b * (hi[1] - lo[1])};
}

PhysicsConfig PhysicsConfig::defaults(Task task) {
  PhysicsConfig c;
  c.task = task;
  switch (task) {
    case Task::Push:
      c.mu = 0.3;
      c.eff_workspace = {{-0.25, -0.3}, {0.45, 0.3}};
      c.obj_bounds = {{-0.35, -0.4}, {0.55, 0.4}};
      c.eff_start = {{-0.14, -0.04}, {-0.10, 0.04}};
      c.obj_start = {{-0.015, -0.015}, {0.015, 0.015}};
      c.goal_hard = {{0.065, -0.1}, {0.265, 0.1}};
      break;
    case Task::Slide:
      c.mu = 0.1;
      c.max_force = 8.0;
      c.eff_damping = 4.0;
      c.eff_workspace = {{-0.3, -0.25}, {0.1, 0.25}};
      c.obj_bounds = {{-0.4, -0.45}, {0.95, 0.45}};
      c.eff_start = {{-0.22, -0.03}, {-0.18, 0.03}};
      c.obj_start = {{-0.02, -0.02}, {0.02, 0.02}};
      c.goal_hard = {{0.4, -0.2}, {0.7, 0.2}};
      break;
    case Task::Lift:
      c.mu = 0.3;
      c.obj_radius = 0.025;
      c.eff_workspace = {{-0.25, 0.0}, {0.25, 0.35}};
      c.obj_bounds = {{-0.3, 0.025}, {0.3, 0.45}};
      c.eff_start = {{-0.05, 0.10}, {0.05, 0.14}};
      c.obj_start = {{-0.03, 0.025}, {0.03, 0.025}};
      c.goal_hard = {{-0.15, 0.08}, {0.15, 0.28}};
      break;
  }
  return c;
}

void PhysicsConfig::validate() const {
  require(dt > 0.0 && std::isfinite(dt), "dt", "must be > 0");
  require(substeps >= 1, "substeps", "must be >= 1");
  require(k_n > 0.0, "k_n", "must be > 0");
  require(mu >= 0.0, "mu", "must be >= 0");
  require(m_obj > 0.0, "m_obj", "must be > 0");
  require(m_eff > 0.0, "m_eff", "must be > 0");
  require(eff_damping >= 0.0, "eff_damping", "must be >= 0");
  require(max_force > 0.0, "max_force", "must be > 0");
  require(eff_radius > 0.0, "eff_radius", "must be > 0");
  require(obj_radius > 0.0, "obj_radius", "must be > 0");
  require(valid_region(eff_workspace), "eff_workspace", "lo must not exceed hi");
  require(valid_region(obj_bounds), "obj_bounds", "lo must not exceed hi");
  require(valid_region(goal_hard), "goal_hard", "lo must not exceed hi");
  require(eff_workspace.contains(eff_start), "eff_start", "must lie inside eff_workspace");
  require(obj_bounds.contains(obj_start), "obj_start", "must lie inside obj_bounds");
  require(simple_scale > 0.0 && simple_scale <= intermediate_scale, "simple_scale",
          "must be in (0, intermediate_scale]");
  require(intermediate_scale <= 1.0, "intermediate_scale", "must be <= 1");
  if (task == Task::Lift) {
    require(aperture_max > 0.0, "aperture_max", "must be > 0");
    require(finger_radius > 0.0, "finger_radius", "must be > 0");
    require(grip_speed > 0.0, "grip_speed", "must be > 0");
    require(grasp_threshold > 0.0, "grasp_threshold", "must be > 0");
    require(goal_hard.lo[1] > obj_start.hi[1], "goal_hard",
            "Lift goals must lie above the table-level object height");
  }
}

Region PhysicsConfig::goal_region(Difficulty level) const {
  switch (level) {
    case Difficulty::Simple: return goal_hard.scaled(simple_scale);
    case Difficulty::Intermediate: return goal_hard.scaled(intermediate_scale);
    case Difficulty::Hard: return goal_hard;
  }
  throw ConfigError("unknown difficulty level");
}

double disc_disc_overlap(const Vec2& a, double ra, const Vec2& b, double rb) {
  return std::max(0.0, ra + rb - norm({b[0] - a[0], b[1] - a[1]}));
}

double disc_box_overlap(const Vec2& center, double radius, const Vec2& box_center,
                        double half_size) {
  Vec2 n{};
  return disc_box_contact(center, radius, box_center, half_size, n);
}

std::array<Vec2, 2> finger_centers(const PhysicsState& s, const PhysicsConfig& c) {
  const double off = s.aperture / 2 + c.finger_radius;
  return {Vec2{s.eff_pos[0] - off, s.eff_pos[1]}, Vec2{s.eff_pos[0] + off, s.eff_pos[1]}};
}

ContactForces contact_forces(const PhysicsState& s, const PhysicsConfig& c) {
  ContactForces f;
  if (c.task != Task::Lift) {
    const Vec2 d{s.obj_pos[0] - s.eff_pos[0], s.obj_pos[1] - s.eff_pos[1]};
    const double dist = norm(d);
    const double depth = std::max(0.0, c.eff_radius + c.obj_radius - dist);
    if (depth > 0.0) {
      const Vec2 n = dist > 0.0 ? Vec2{d[0] / dist, d[1] / dist} : Vec2{1.0, 0.0};
      const double mag = c.k_n * depth;
      f.on_object = {mag * n[0], mag * n[1]};
      f.left = mag;
      f.magnitude = mag;
    }
    return f;
  }
  const auto fingers = finger_centers(s, c);
  double mags[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    Vec2 n{};
    const double depth = disc_box_contact(fingers[k], c.finger_radius, s.obj_pos, c.obj_radius, n);
    if (depth > 0.0) {
      mags[k] = c.k_n * depth;
      // n points from the object toward the finger; the object is pushed away.
      f.on_object[0] -= mags[k] * n[0];
      f.on_object[1] -= mags[k] * n[1];
    }
  }
  f.left = mags[0];
  f.right = mags[1];
  f.magnitude = mags[0] + mags[1];
  return f;
}

double contact_force(const PhysicsState& state, const PhysicsConfig& config) {
  return contact_forces(state, config).magnitude;
}

PhysicsState integrate(const PhysicsState& s, std::span<const double> action,
                       const PhysicsConfig& c) {
  const std::size_t expected = c.task == Task::Lift ? 3 : 2;
  if (action.size() != expected) throw UsageError("integrate: wrong action dimension");
  const double dt = c.dt;
  PhysicsState n = s;

  const ContactForces contact = s.latched ? ContactForces{} : contact_forces(s, c);

  // Effector: commanded force, viscous drag, contact reaction.
  for (int k = 0; k < 2; ++k) {
    const double f = c.max_force * std::clamp(action[k], -1.0, 1.0) - c.eff_damping * s.eff_vel[k] -
                     contact.on_object[k];
    n.eff_vel[k] = s.eff_vel[k] + dt * f / c.m_eff;
  }
  n.eff_pos = {s.eff_pos[0] + dt * n.eff_vel[0], s.eff_pos[1] + dt * n.eff_vel[1]};
  clamp_body(n.eff_pos, n.eff_vel, c.eff_workspace);

  if (c.task != Task::Lift) {
    n.obj_vel = {s.obj_vel[0] + dt * contact.on_object[0] / c.m_obj,
                 s.obj_vel[1] + dt * contact.on_object[1] / c.m_obj};
    apply_friction(n.obj_vel, c.mu * c.gravity * dt);
    n.obj_pos = {s.obj_pos[0] + dt * n.obj_vel[0], s.obj_pos[1] + dt * n.obj_vel[1]};
    clamp_body(n.obj_pos, n.obj_vel, c.obj_bounds);
  } else {
    const double grip = std::clamp(action[2], -1.0, 1.0);
    if (s.latched) {
      if (grip > 0.0) {
        n.latched = false;
        n.aperture = std::min(c.aperture_max, s.aperture + c.grip_speed * grip * dt);
      }
    } else {
      n.aperture = std::clamp(s.aperture + c.grip_speed * grip * dt, 0.0, c.aperture_max);
      if (grip < 0.0 && contact.left > c.grasp_threshold && contact.right > c.grasp_threshold) {
        n.latched = true;
        n.grasp_offset = {s.obj_pos[0] - s.eff_pos[0], s.obj_pos[1] - s.eff_pos[1]};
      }
    }
    if (n.latched) {
      n.obj_pos = {n.eff_pos[0] + n.grasp_offset[0], n.eff_pos[1] + n.grasp_offset[1]};
      n.obj_vel = n.eff_vel;
      clamp_body(n.obj_pos, n.obj_vel, c.obj_bounds);
    } else {
      const bool resting = s.obj_pos[1] <= c.obj_bounds.lo[1];
      n.obj_vel = {s.obj_vel[0] + dt * contact.on_object[0] / c.m_obj,
                   s.obj_vel[1] + dt * (contact.on_object[1] / c.m_obj - c.gravity)};
      if (resting) apply_friction(n.obj_vel, c.mu * c.gravity * dt, 1);
      n.obj_pos = {s.obj_pos[0] + dt * n.obj_vel[0], s.obj_pos[1] + dt * n.obj_vel[1]};
      clamp_body(n.obj_pos, n.obj_vel, c.obj_bounds);
    }
  }

  if (!finite(n.eff_pos) || !finite(n.eff_vel) || !finite(n.obj_pos) || !finite(n.obj_vel) ||
      !std::isfinite(n.aperture))
    throw SimulationError("non-finite physics state after integration step");
  return n;
}

Goal sample_goal(Difficulty level, const PhysicsConfig& config, std::mt19937_64& rng) {
  const Vec2 p = config.goal_region(level).sample(rng);
  return Goal{{p[0], p[1]}};
}

bool ReachabilityPredicate::operator()(const Goal& goal) const {
  if (goal.dim() != 2) throw UsageError("reachability predicate expects planar goals");
  const Vec2 p{goal.position[0], goal.position[1]};
  return p[0] < reachable_.lo[0] || p[0] > reachable_.hi[0] || p[1] < reachable_.lo[1] ||
         p[1] > reachable_.hi[1];
}

ReachabilityPredicate slide_reachability(const PhysicsConfig& config) {
  return ReachabilityPredicate(config.eff_workspace.inflated(config.eff_radius + config.obj_radius));
}

}  // namespace tactile
