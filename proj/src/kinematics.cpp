#include "rsarl/kinematics.hpp"

#include <stdexcept>
#include <string>

namespace rsarl {

FullAgentState propagate_robot(const FullAgentState& state, const Action& action,
                               const StepConfig& cfg) {
  FullAgentState next = state;
  next.theta = state.theta + action.dtheta;
  const Vec2 vel{action.v * std::cos(next.theta), action.v * std::sin(next.theta)};
  next.px = state.px + vel.x * cfg.dt;
  next.py = state.py + vel.y * cfg.dt;
  next.vx = vel.x;
  next.vy = vel.y;
  return next;
}

FullAgentState propagate_human(const FullAgentState& state, const Vec2& new_velocity,
                               const StepConfig& cfg) {
  const double speed = new_velocity.norm();
  if (speed > state.v_pref + 1e-9) {
    throw std::logic_error("propagate_human: speed " + std::to_string(speed) +
                           " exceeds v_pref " + std::to_string(state.v_pref));
  }
  FullAgentState next = state;
  next.px = state.px + new_velocity.x * cfg.dt;
  next.py = state.py + new_velocity.y * cfg.dt;
  next.vx = new_velocity.x;
  next.vy = new_velocity.y;
  if (speed > 0.0) next.theta = std::atan2(new_velocity.y, new_velocity.x);
  return next;
}

ObservableState extrapolate(const ObservableState& human, double duration) {
  ObservableState next = human;
  next.px += human.vx * duration;
  next.py += human.vy * duration;
  return next;
}

}  // namespace rsarl
