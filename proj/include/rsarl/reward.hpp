#ifndef RSARL_REWARD_HPP_
#define RSARL_REWARD_HPP_

#include <optional>
#include <span>

#include "rsarl/domain.hpp"

namespace rsarl {

struct RewardConfig {
  double d_disc = 0.2;          // m, comfort distance
  double alpha = 0.15;          // static look-ahead weight
  double beta = 0.5;            // dynamic look-ahead weight
  double r_e = 1.0;             // m, effective range (surface clearance)
  double dT_st = 1.0;           // s, static look-ahead horizon
  double dT_dy = 1.0;           // s, dynamic look-ahead horizon
  double dT_L = 1.0;            // s, look-ahead distance horizon
  double t_limit = 25.0;        // s
  double goal_tolerance = 0.3;  // m
  double substep = 0.05;        // s, sampling interval of the dynamic look-ahead
  bool clamp_dynamic = true;    // false keeps beta*(d - d_disc) positive for large d
};

/// Which optional terms enter the total; both on is the full augmented reward.
struct RewardTerms {
  bool lookahead = true;
  bool time = true;

  static RewardTerms full() { return {true, true}; }
  static RewardTerms current_only() { return {false, false}; }
};

struct RewardBreakdown {
  double r_c = 0.0;
  double r_st = 0.0;
  double r_dy = 0.0;
  double r_t = 0.0;
  double total = 0.0;
  int n_col = 0;
  int n_static = 0;
  std::optional<double> d_lookahead_dyn;  // m, absent with no dynamic human in range
};

struct StaticLookahead {
  double reward = 0.0;
  int n_col = 0;
  int n_static = 0;
};

struct DynamicLookahead {
  double reward = 0.0;
  std::optional<double> min_clearance;
};

bool at_goal(const FullAgentState& robot, const RewardConfig& cfg);

/// Current-state reward from the post-action snapshot. Collision wins over goal.
double current_reward(const JointState& state, const JointState& next_state,
                      const RewardConfig& cfg);

/// True iff the human center comes closer than the summed radii to the segment
/// swept by the robot center over `horizon` at `speed` along `heading`.
bool swept_collision(const Vec2& robot_pos, double heading, double speed, double horizon,
                     const ObservableState& human, double robot_radius);

/// Counts static humans within r_e whose circles the action's sweep over dT_st hits.
/// The sweep starts after the action's heading change.
StaticLookahead lookahead_static(const JointState& state, const Action& action,
                                 std::span<const std::size_t> static_ids,
                                 const RewardConfig& cfg);

/// Minimum clearance to in-range dynamic humans over dT_dy, humans at constant
/// velocity and the robot following the action; beta*min(0, d - d_disc).
DynamicLookahead lookahead_dynamic(const JointState& state, const Action& action,
                                   std::span<const std::size_t> dynamic_ids,
                                   const RewardConfig& cfg);

double time_reward(double t, bool reached_goal, const RewardConfig& cfg);

/// Full reward for the transition state -> next_state under `action`, with t the
/// time at next_state. Terms switched off by `terms` are reported as 0; the
/// look-ahead counts and clearance are always filled.
RewardBreakdown total_reward(const JointState& state, const JointState& next_state,
                             const Action& action, double t,
                             std::span<const std::size_t> static_ids, const RewardConfig& cfg,
                             const RewardTerms& terms);

}  // namespace rsarl

#endif  // RSARL_REWARD_HPP_
