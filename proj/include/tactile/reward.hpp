#pragma once

#include "tactile/env.hpp"

namespace tactile {

struct RewardParams {
  double w_ext = 0.75;
  double w_int = 0.25;
  double eps_pos = 0.05;    // m
  double eps_force = 10.0;  // N

  // Throws ConfigError on invalid values.
  void validate() const;
  double max_reward() const { return w_ext + w_int; }

  static RewardParams for_task(Task task);
  // Weights collapsed to w_ext = 1, w_int = 0: the plain sparse {0, 1} reward.
  RewardParams extrinsic_only() const;
};

// 1 iff ||desired - achieved|| < eps_pos.
double extrinsic_reward(const Goal& achieved, const Goal& desired, const RewardParams& params);

// 1 iff force_sum > eps_force. Independent of the goal.
double intrinsic_reward(double force_sum, const RewardParams& params);

// w_ext * extrinsic + w_int * intrinsic.
double combined_reward(const Goal& achieved, const Goal& desired, double force_sum,
                       const RewardParams& params);

// The threshold predicate shared by the intrinsic reward and contact
// prioritization.
inline bool contact_threshold_reached(double force_sum, double eps_force) {
  return force_sum > eps_force;
}

}  // namespace tactile
