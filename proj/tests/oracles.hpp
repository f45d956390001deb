#ifndef RSARL_TESTS_ORACLES_HPP_
#define RSARL_TESTS_ORACLES_HPP_

// Brute-force reference computations shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "rsarl/crowd_policy.hpp"
#include "rsarl/kinematics.hpp"
#include "rsarl/random.hpp"
#include "rsarl/valuenet.hpp"

namespace rsarl::oracle {

inline double max_violation(std::span<const HalfPlane> planes, const Vec2& v) {
  double worst = 0.0;
  for (const HalfPlane& h : planes) worst = std::max(worst, h.violation(v));
  return worst;
}

/// Grid search over the speed disc at `step` resolution for the smallest
/// maximum half-plane violation.
inline Vec2 grid_min_violation(std::span<const HalfPlane> planes, double max_speed,
                               double step = 0.01) {
  Vec2 best;
  double best_val = std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(std::ceil(max_speed / step));
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      const Vec2 v{i * step, j * step};
      if (v.norm_sq() > max_speed * max_speed) continue;
      const double val = max_violation(planes, v);
      if (val < best_val) {
        best_val = val;
        best = v;
      }
    }
  }
  return best;
}

/// Dense 1 ms time-stepping of a straight robot path against a static circle.
inline bool dense_sweep_hits(const Vec2& start, double heading, double speed, double horizon,
                             const ObservableState& human, double robot_radius) {
  const long steps = std::lround(horizon / 1e-3);
  const Vec2 dir{std::cos(heading), std::sin(heading)};
  const double combined = robot_radius + human.radius;
  for (long k = 0; k <= steps; ++k) {
    const Vec2 p = start + dir * (speed * 1e-3 * static_cast<double>(k));
    if ((p - human.position()).norm() < combined) return true;
  }
  return false;
}

struct CrossingStats {
  double min_center_gap = std::numeric_limits<double>::infinity();  // distance minus radii
  int agents = 0;
  int arrived = 0;
};

/// Circle crossing with n ORCA agents on a radius-4 circle, no robot, run
/// until every agent arrives or twice the straight-line time elapses.
inline CrossingStats orca_crossing(int n, std::uint64_t seed, const OrcaConfig& cfg,
                                   double radius = 0.3, double circle = 4.0) {
  Rng rng(seed);
  std::vector<FullAgentState> agents;
  while (static_cast<int>(agents.size()) < n) {
    const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const Vec2 p{circle * std::cos(a), circle * std::sin(a)};
    bool ok = true;
    for (const auto& o : agents) {
      if ((o.position() - p).norm() < 2 * radius + 0.2 ||
          (o.goal() + p).norm() < 2 * radius + 0.2) {
        ok = false;
      }
    }
    if (!ok) continue;
    FullAgentState s;
    s.px = p.x;
    s.py = p.y;
    s.gx = -p.x;
    s.gy = -p.y;
    s.radius = radius;
    s.v_pref = 1.0;
    agents.push_back(s);
  }
  const StepConfig step{cfg.dt};
  const double limit = 2.0 * (2.0 * circle) / 1.0;
  CrossingStats stats;
  stats.agents = n;
  std::vector<bool> arrived(agents.size(), false);
  for (double t = 0.0; t < limit - 1e-9; t += cfg.dt) {
    const auto vel = crowd_step(agents, std::nullopt, cfg);
    for (std::size_t i = 0; i < agents.size(); ++i) agents[i] = propagate_human(agents[i], vel[i], step);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      if (!arrived[i] && (agents[i].position() - agents[i].goal()).norm() < 0.3) arrived[i] = true;
      for (std::size_t j = i + 1; j < agents.size(); ++j) {
        const double gap = (agents[i].position() - agents[j].position()).norm() -
                           agents[i].radius - agents[j].radius;
        stats.min_center_gap = std::min(stats.min_center_gap, gap);
      }
    }
    if (std::all_of(arrived.begin(), arrived.end(), [](bool b) { return b; })) break;
  }
  stats.arrived = static_cast<int>(std::count(arrived.begin(), arrived.end(), true));
  return stats;
}

/// Largest relative error between the analytic gradient of (V - target)^2 and
/// central differences with step h, over every parameter.
inline double gradient_check(const ValueNetParams& params, const NetInput& input, double target,
                             double h = 1e-5) {
  const std::vector<double> analytic = gradient(params, input, target).flatten();
  std::vector<double> flat = params.flatten();
  ValueNetParams probe = params;
  double worst = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double keep = flat[i];
    flat[i] = keep + h;
    probe.assign(flat);
    const double vp = forward(probe, input) - target;
    flat[i] = keep - h;
    probe.assign(flat);
    const double vm = forward(probe, input) - target;
    flat[i] = keep;
    const double numeric = (vp * vp - vm * vm) / (2.0 * h);
    const double scale = std::max({std::fabs(analytic[i]), std::fabs(numeric), 1e-6});
    worst = std::max(worst, std::fabs(analytic[i] - numeric) / scale);
  }
  return worst;
}

}  // namespace rsarl::oracle

#endif  // RSARL_TESTS_ORACLES_HPP_
