#include "rsarl/reward.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rsarl {
namespace {

double clearance(const Vec2& robot_pos, double robot_radius, const ObservableState& h) {
  return (h.position() - robot_pos).norm() - robot_radius - h.radius;
}

bool in_effective_range(const FullAgentState& robot, const ObservableState& h,
                        const RewardConfig& cfg) {
  return clearance(robot.position(), robot.radius, h) <= cfg.r_e;
}

std::vector<std::size_t> complement(std::span<const std::size_t> ids, std::size_t n) {
  std::vector<bool> member(n, false);
  for (const std::size_t i : ids) {
    if (i < n) member[i] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i) {
    if (!member[i]) rest.push_back(i);
  }
  return rest;
}

}  // namespace

bool at_goal(const FullAgentState& robot, const RewardConfig& cfg) {
  return (robot.position() - robot.goal()).norm() < cfg.goal_tolerance;
}

double current_reward(const JointState& /*state*/, const JointState& next_state,
                      const RewardConfig& cfg) {
  const double d_t = min_clearance(next_state);
  if (d_t < 0.0) return -0.25;
  if (d_t < cfg.d_disc) return 0.25 * (-0.1 + d_t / 2.0);
  if (at_goal(next_state.robot, cfg)) return 1.0;
  return 0.0;
}

bool swept_collision(const Vec2& robot_pos, double heading, double speed, double horizon,
                     const ObservableState& human, double robot_radius) {
  const Vec2 dir{std::cos(heading), std::sin(heading)};
  const double length = speed * horizon;
  const Vec2 rel = human.position() - robot_pos;
  // Closest point on the segment [0, length] along dir.
  const double s = std::clamp(rel.dot(dir), 0.0, std::max(length, 0.0));
  const double dist = (rel - dir * s).norm();
  return dist < robot_radius + human.radius;
}

StaticLookahead lookahead_static(const JointState& state, const Action& action,
                                 std::span<const std::size_t> static_ids,
                                 const RewardConfig& cfg) {
  StaticLookahead out;
  const FullAgentState& robot = state.robot;
  const double heading = robot.theta + action.dtheta;
  for (const std::size_t id : static_ids) {
    if (id >= state.humans.size()) continue;
    const ObservableState& h = state.humans[id];
    if (!in_effective_range(robot, h, cfg)) continue;
    ++out.n_static;
    if (swept_collision(robot.position(), heading, action.v, cfg.dT_st, h, robot.radius)) {
      ++out.n_col;
    }
  }
  if (out.n_static > 0) {
    out.reward = -cfg.alpha * static_cast<double>(out.n_col) / static_cast<double>(out.n_static);
  }
  return out;
}

DynamicLookahead lookahead_dynamic(const JointState& state, const Action& action,
                                   std::span<const std::size_t> dynamic_ids,
                                   const RewardConfig& cfg) {
  DynamicLookahead out;
  const FullAgentState& robot = state.robot;
  const double heading = robot.theta + action.dtheta;
  const Vec2 robot_vel{action.v * std::cos(heading), action.v * std::sin(heading)};
  const int samples = std::max(1, static_cast<int>(std::lround(cfg.dT_dy / cfg.substep)));
  const double step = cfg.dT_dy / samples;

  double best = 0.0;
  bool any = false;
  for (const std::size_t id : dynamic_ids) {
    if (id >= state.humans.size()) continue;
    const ObservableState& h = state.humans[id];
    if (!in_effective_range(robot, h, cfg)) continue;
    for (int k = 1; k <= samples; ++k) {
      const double s = step * k;
      const Vec2 rp = robot.position() + robot_vel * s;
      const Vec2 hp = h.position() + h.velocity() * s;
      const double d = (hp - rp).norm() - robot.radius - h.radius;
      if (!any || d < best) best = d;
      any = true;
    }
  }
  if (!any) return out;
  out.min_clearance = best;
  const double shortfall = best - cfg.d_disc;
  out.reward = cfg.beta * (cfg.clamp_dynamic ? std::min(0.0, shortfall) : shortfall);
  return out;
}

double time_reward(double t, bool reached_goal, const RewardConfig& cfg) {
  if (reached_goal) return -0.1 * t / cfg.t_limit;
  if (t >= cfg.t_limit) return -0.2;
  return 0.0;
}

RewardBreakdown total_reward(const JointState& state, const JointState& next_state,
                             const Action& action, double t,
                             std::span<const std::size_t> static_ids, const RewardConfig& cfg,
                             const RewardTerms& terms) {
  RewardBreakdown out;
  out.r_c = current_reward(state, next_state, cfg);

  const auto st = lookahead_static(state, action, static_ids, cfg);
  out.r_st = st.reward;
  out.n_col = st.n_col;
  out.n_static = st.n_static;

  const auto dynamic_ids = complement(static_ids, state.humans.size());
  const auto dy = lookahead_dynamic(state, action, dynamic_ids, cfg);
  out.r_dy = dy.reward;
  out.d_lookahead_dyn = dy.min_clearance;

  const bool collided = min_clearance(next_state) < 0.0;
  out.r_t = time_reward(t, !collided && at_goal(next_state.robot, cfg), cfg);

  // Disabled terms are zeroed so the parts always sum to the total; the
  // diagnostic counts stay populated.
  if (!terms.lookahead) out.r_st = out.r_dy = 0.0;
  if (!terms.time) out.r_t = 0.0;
  out.total = out.r_c + out.r_st + out.r_dy + out.r_t;
  return out;
}

}  // namespace rsarl
