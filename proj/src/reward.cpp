#include "tactile/reward.hpp"

#include <cmath>

#include "tactile/errors.hpp"

namespace tactile {

void RewardParams::validate() const {
  if (!(w_ext >= 0.0)) throw ConfigError("reward.w_ext: must be >= 0");
  if (!(w_int >= 0.0)) throw ConfigError("reward.w_int: must be >= 0");
  if (!(eps_pos > 0.0)) throw ConfigError("reward.eps_pos: must be > 0");
  if (!(eps_force > 0.0)) throw ConfigError("reward.eps_force: must be > 0");
}

RewardParams RewardParams::for_task(Task task) {
  RewardParams p;
  p.eps_force = task == Task::Slide ? 3.0 : 10.0;
  return p;
}

RewardParams RewardParams::extrinsic_only() const {
  RewardParams p = *this;
  p.w_ext = 1.0;
  p.w_int = 0.0;
  return p;
}

double extrinsic_reward(const Goal& achieved, const Goal& desired, const RewardParams& params) {
  return distance(achieved, desired) < params.eps_pos ? 1.0 : 0.0;
}

double intrinsic_reward(double force_sum, const RewardParams& params) {
  if (force_sum < 0.0 || std::isnan(force_sum)) throw DataError("force_sum must be >= 0");
  return contact_threshold_reached(force_sum, params.eps_force) ? 1.0 : 0.0;
}

double combined_reward(const Goal& achieved, const Goal& desired, double force_sum,
                       const RewardParams& params) {
  return params.w_ext * extrinsic_reward(achieved, desired, params) +
         params.w_int * intrinsic_reward(force_sum, params);
}

}  // namespace tactile
