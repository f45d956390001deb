#ifndef RSARL_TESTS_HELPERS_HPP_
#define RSARL_TESTS_HELPERS_HPP_

#include <cmath>
#include <vector>

#include "rsarl/domain.hpp"
#include "rsarl/random.hpp"

namespace rsarl::test {

inline FullAgentState robot_at(double x, double y, double theta, double gx, double gy) {
  FullAgentState r;
  r.px = x;
  r.py = y;
  r.theta = theta;
  r.gx = gx;
  r.gy = gy;
  r.v_pref = 1.0;
  r.radius = 0.3;
  return r;
}

inline ObservableState human_at(double x, double y, double vx = 0.0, double vy = 0.0,
                                double radius = 0.3) {
  return {x, y, vx, vy, radius};
}

inline JointState random_joint_state(Rng& rng, int n_humans) {
  JointState s;
  s.robot = robot_at(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3.1, 3.1),
                     uniform(rng, -4, 4), uniform(rng, -4, 4));
  for (int i = 0; i < n_humans; ++i) {
    s.humans.push_back(human_at(uniform(rng, -4, 4), uniform(rng, -4, 4), uniform(rng, -1, 1),
                                uniform(rng, -1, 1), uniform(rng, 0.2, 0.4)));
  }
  return s;
}

}  // namespace rsarl::test

#endif  // RSARL_TESTS_HELPERS_HPP_
