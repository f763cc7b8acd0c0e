#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Goal-conditioned environment contract shared by every task.
namespace tactile {

enum class Task { Push, Slide, Lift };
enum class Difficulty { Simple, Intermediate, Hard };

std::string_view to_string(Task task);
std::string_view to_string(Difficulty level);
Task parse_task(std::string_view name);
Difficulty parse_difficulty(std::string_view name);

struct Goal {
  std::vector<double> position;

  std::size_t dim() const { return position.size(); }
  friend bool operator==(const Goal&, const Goal&) = default;
};

double distance(const Goal& a, const Goal& b);

// Index table of the flat observation vector:
//
//   [ proprio (proprio_dim) | object (object_dim) | force_now | force_sum ]
//
// The last `proprio_tactile_dim` proprio entries are per-finger force readings
// (Lift only). The first `goal_dim` object entries are the object position,
// which is the achieved goal. Without tactile channels the finger forces,
// force_now and force_sum are all dropped.
struct ObservationLayout {
  std::size_t proprio_dim = 0;
  std::size_t proprio_tactile_dim = 0;
  std::size_t object_dim = 0;
  std::size_t goal_dim = 0;

  std::size_t size(bool tactile = true) const {
    return tactile ? proprio_dim + object_dim + 2
                   : proprio_dim - proprio_tactile_dim + object_dim;
  }
  std::size_t object_offset() const { return proprio_dim; }
  std::size_t force_now_index() const { return proprio_dim + object_dim; }
  std::size_t force_sum_index() const { return proprio_dim + object_dim + 1; }
};

struct Observation {
  std::vector<double> proprio;
  std::vector<double> object;
  double force_now = 0.0;
  double force_sum = 0.0;

  // Object-position slice.
  Goal achieved(std::size_t goal_dim) const;
  // Flat vector in the documented layout; `tactile` selects the channel set.
  std::vector<double> flatten(const ObservationLayout& layout, bool tactile = true) const;
  void append_to(std::vector<double>& out, const ObservationLayout& layout,
                 bool tactile) const;
  static Observation unflatten(std::span<const double> flat, const ObservationLayout& layout);

  friend bool operator==(const Observation&, const Observation&) = default;
};

using Action = std::vector<double>;

// Clamps every component into [-1, 1].
Action clamp_action(std::span<const double> action);

struct StepOutcome {
  Observation next_obs;
  Goal achieved;
  double force_reading = 0.0;
};

struct EnvConfig {
  int horizon = 50;
  double eps_pos = 0.05;
};

// True iff the Euclidean distance is strictly below eps_pos.
bool is_success(const Goal& achieved, const Goal& desired, double eps_pos);

class Env {
 public:
  virtual ~Env() = default;

  virtual std::pair<Observation, Goal> reset(Difficulty level, std::uint64_t seed) = 0;
  virtual StepOutcome step(std::span<const double> action) = 0;

  virtual Task task() const = 0;
  virtual const ObservationLayout& layout() const = 0;
  virtual std::size_t action_dim() const = 0;
  virtual const EnvConfig& env_config() const = 0;
  virtual int steps_taken() const = 0;

  int horizon() const { return env_config().horizon; }
  double eps_pos() const { return env_config().eps_pos; }
};

}  // namespace tactile
