#include "rsarl/domain.hpp"

#include <limits>
#include <stdexcept>

namespace rsarl {

RotatedState rotate_to_robot_frame(const JointState& state) {
  const FullAgentState& robot = state.robot;
  const Vec2 origin = robot.position();
  const double heading = robot.theta;

  RotatedState out;
  const Vec2 to_goal = robot.goal() - origin;
  out.robot.goal_distance = to_goal.norm();
  out.robot.v_pref = robot.v_pref;
  out.robot.goal_bearing =
      to_goal.norm_sq() > 0.0 ? wrap_angle(std::atan2(to_goal.y, to_goal.x) - heading) : 0.0;
  out.robot.radius = robot.radius;

  out.humans.reserve(state.humans.size());
  for (const ObservableState& h : state.humans) {
    const Vec2 offset = h.position() - origin;
    const Vec2 p = rotated(offset, -heading);
    const Vec2 v = rotated(h.velocity(), -heading);
    HumanFeatures f;
    f.px = p.x;
    f.py = p.y;
    f.vx = v.x;
    f.vy = v.y;
    f.radius = h.radius;
    f.distance = offset.norm();
    f.combined_radius = h.radius + robot.radius;
    out.humans.push_back(f);
  }
  return out;
}

std::vector<Action> build_action_space(double v_pref, int n_headings, double dtheta_max) {
  if (n_headings < 1) throw std::invalid_argument("build_action_space: n_headings must be >= 1");
  if (!(dtheta_max > 0.0)) throw std::invalid_argument("build_action_space: dtheta_max must be > 0");

  std::vector<Action> actions;
  actions.reserve(static_cast<std::size_t>(n_headings) + 1);
  actions.push_back({0.0, 0.0});
  if (n_headings == 1) {
    actions.push_back({v_pref, 0.0});
    return actions;
  }
  const double step = 2.0 * dtheta_max / static_cast<double>(n_headings - 1);
  for (int k = 0; k < n_headings; ++k) {
    // Pin the last heading to the exact bound instead of accumulating rounding.
    const double dtheta = k == n_headings - 1 ? dtheta_max : -dtheta_max + step * k;
    actions.push_back({v_pref, dtheta});
  }
  return actions;
}

double min_clearance(const JointState& state) {
  double best = std::numeric_limits<double>::infinity();
  const Vec2 p = state.robot.position();
  for (const ObservableState& h : state.humans) {
    const double d = (h.position() - p).norm() - h.radius - state.robot.radius;
    if (d < best) best = d;
  }
  return best;
}

}  // namespace rsarl
