#ifndef RSARL_KINEMATICS_HPP_
#define RSARL_KINEMATICS_HPP_

#include "rsarl/domain.hpp"

namespace rsarl {

struct StepConfig {
  double dt = 0.25;  // s
};

/// Unicycle update: rotate by action.dtheta, then advance v*dt along the new heading.
FullAgentState propagate_robot(const FullAgentState& state, const Action& action,
                               const StepConfig& cfg);

/// Holonomic update used for humans. Throws std::logic_error when the commanded
/// speed exceeds v_pref, which can only come from a crowd-policy bug.
FullAgentState propagate_human(const FullAgentState& state, const Vec2& new_velocity,
                               const StepConfig& cfg);

/// Constant-velocity extrapolation of an observed human over `duration` seconds.
ObservableState extrapolate(const ObservableState& human, double duration);

}  // namespace rsarl

#endif  // RSARL_KINEMATICS_HPP_
