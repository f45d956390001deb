#include "rsarl/episode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rsarl {

Action StraightPolicy::act(const JointState& state, const PolicyContext& /*ctx*/) const {
  const FullAgentState& r = state.robot;
  const double goal_dir = std::atan2(r.gy - r.py, r.gx - r.px);
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    if (actions_[i].v <= 0.0) continue;
    const double err = std::fabs(wrap_angle(r.theta + actions_[i].dtheta - goal_dir));
    if (err < best_err) {
      best_err = err;
      best = i;
    }
  }
  return actions_[best];
}

std::size_t OrcaPolicy::project(std::span<const Action> actions, double theta,
                                const Vec2& velocity) {
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const double heading = theta + actions[i].dtheta;
    const Vec2 v{actions[i].v * std::cos(heading), actions[i].v * std::sin(heading)};
    const double d = (v - velocity).norm_sq();
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

Action OrcaPolicy::act(const JointState& state, const PolicyContext& ctx) const {
  std::vector<bool> is_static(state.humans.size(), false);
  for (const std::size_t id : ctx.static_ids) {
    if (id < is_static.size()) is_static[id] = true;
  }
  std::vector<OrcaNeighbor> neighbors;
  neighbors.reserve(state.humans.size());
  for (std::size_t i = 0; i < state.humans.size(); ++i) {
    neighbors.push_back({state.humans[i], is_static[i] ? 1.0 : 0.5});
  }
  const Vec2 v = orca_velocity(state.robot, neighbors, cfg_);
  return actions_[project(actions_, state.robot.theta, v)];
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::success: return "success";
    case Outcome::collision: return "collision";
    case Outcome::timeout: return "timeout";
  }
  return "timeout";
}

Outcome outcome_from_string(std::string_view name) {
  if (name == "success") return Outcome::success;
  if (name == "collision") return Outcome::collision;
  if (name == "timeout") return Outcome::timeout;
  throw std::invalid_argument("unknown outcome '" + std::string(name) + "'");
}

JointState Snapshot::joint_state() const {
  JointState s;
  s.robot = robot;
  s.humans.reserve(humans.size());
  for (const FullAgentState& h : humans) s.humans.push_back(h.observable());
  return s;
}

bool is_discomfort(double clearance, double d_disc) {
  return clearance >= 0.0 && clearance < d_disc;
}

EpisodeRecord run_episode(const Policy& policy, const Scenario& scenario,
                          const EpisodeConfig& cfg, Rng& rng) {
  OrcaConfig orca = cfg.orca;
  orca.dt = cfg.step.dt;

  EpisodeRecord rec;
  rec.seed = scenario.seed;
  rec.env = scenario.env;
  rec.static_ids = scenario.static_ids;
  rec.snapshots.push_back({0.0, scenario.robot, scenario.humans});

  for (long k = 0;; ++k) {
    const Snapshot& snap = rec.snapshots.back();
    const JointState state = snap.joint_state();
    const PolicyContext ctx{rec.static_ids, snap.t, &rng};
    const Action action = policy.act(state, ctx);
    const std::vector<Vec2> velocities = crowd_step(snap.humans, snap.robot.observable(), orca);

    Snapshot next;
    // Step times are k * dt snapped to 1 ns so repeated addition cannot drift
    // past or short of t_limit.
    next.t = std::round(static_cast<double>(k + 1) * cfg.step.dt * 1e9) / 1e9;
    next.robot = propagate_robot(snap.robot, action, cfg.step);
    next.humans.reserve(snap.humans.size());
    for (std::size_t i = 0; i < snap.humans.size(); ++i) {
      next.humans.push_back(propagate_human(snap.humans[i], velocities[i], cfg.step));
    }

    const JointState next_state = next.joint_state();
    const RewardBreakdown reward = total_reward(state, next_state, action, next.t,
                                                rec.static_ids, cfg.reward, cfg.terms);
    const double clearance = min_clearance(next_state);
    const bool goal = at_goal(next.robot, cfg.reward);

    rec.actions.push_back(action);
    rec.rewards.push_back(reward);
    rec.clearances.push_back(clearance);
    if (is_discomfort(clearance, cfg.reward.d_disc)) ++rec.discomfort_steps;
    rec.snapshots.push_back(std::move(next));

    const double t = rec.snapshots.back().t;
    if (clearance < 0.0) {
      rec.outcome = Outcome::collision;
    } else if (goal) {
      rec.outcome = Outcome::success;
    } else if (t >= cfg.reward.t_limit) {
      rec.outcome = Outcome::timeout;
    } else {
      continue;
    }
    rec.nav_time = t;
    return rec;
  }
}

}  // namespace rsarl
