#include "tactile/env.hpp"

#include <algorithm>
#include <cmath>

#include "tactile/errors.hpp"

namespace tactile {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::Push: return "push";
    case Task::Slide: return "slide";
    case Task::Lift: return "lift";
  }
  return "?";
}

std::string_view to_string(Difficulty level) {
  switch (level) {
    case Difficulty::Simple: return "simple";
    case Difficulty::Intermediate: return "intermediate";
    case Difficulty::Hard: return "hard";
  }
  return "?";
}

namespace {
std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}
}  // namespace

Task parse_task(std::string_view name) {
  const std::string n = lower(name);
  if (n == "push") return Task::Push;
  if (n == "slide") return Task::Slide;
  if (n == "lift" || n == "pick-and-place" || n == "pickandplace") return Task::Lift;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected push, slide or lift)");
}

Difficulty parse_difficulty(std::string_view name) {
  const std::string n = lower(name);
  if (n == "simple") return Difficulty::Simple;
  if (n == "intermediate") return Difficulty::Intermediate;
  if (n == "hard") return Difficulty::Hard;
  throw ConfigError("unknown difficulty '" + std::string(name) +
                    "' (expected simple, intermediate or hard)");
}

double distance(const Goal& a, const Goal& b) {
  if (a.dim() != b.dim()) throw UsageError("goal dimension mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a.position[i] - b.position[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

bool is_success(const Goal& achieved, const Goal& desired, double eps_pos) {
  if (!(eps_pos > 0.0)) throw UsageError("eps_pos must be positive");
  return distance(achieved, desired) < eps_pos;
}

Goal Observation::achieved(std::size_t goal_dim) const {
  if (goal_dim > object.size()) throw UsageError("goal_dim exceeds object block");
  return Goal{{object.begin(), object.begin() + static_cast<std::ptrdiff_t>(goal_dim)}};
}

void Observation::append_to(std::vector<double>& out, const ObservationLayout& layout,
                            bool tactile) const {
  const std::size_t proprio_keep =
      tactile ? proprio.size() : proprio.size() - layout.proprio_tactile_dim;
  out.insert(out.end(), proprio.begin(), proprio.begin() + static_cast<std::ptrdiff_t>(proprio_keep));
  out.insert(out.end(), object.begin(), object.end());
  if (tactile) {
    out.push_back(force_now);
    out.push_back(force_sum);
  }
}

std::vector<double> Observation::flatten(const ObservationLayout& layout, bool tactile) const {
  std::vector<double> out;
  out.reserve(layout.size(tactile));
  append_to(out, layout, tactile);
  return out;
}

Observation Observation::unflatten(std::span<const double> flat, const ObservationLayout& layout) {
  if (flat.size() != layout.size(true)) throw DataError("observation vector has wrong length");
  Observation obs;
  auto it = flat.begin();
  obs.proprio.assign(it, it + static_cast<std::ptrdiff_t>(layout.proprio_dim));
  it += static_cast<std::ptrdiff_t>(layout.proprio_dim);
  obs.object.assign(it, it + static_cast<std::ptrdiff_t>(layout.object_dim));
  obs.force_now = flat[layout.force_now_index()];
  obs.force_sum = flat[layout.force_sum_index()];
  return obs;
}

Action clamp_action(std::span<const double> action) {
  Action out(action.begin(), action.end());
  for (double& a : out) {
    if (std::isnan(a)) throw UsageError("action component is NaN");
    a = std::clamp(a, -1.0, 1.0);
  }
  return out;
}

}  // namespace tactile
