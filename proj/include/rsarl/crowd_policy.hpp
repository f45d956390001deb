#ifndef RSARL_CROWD_POLICY_HPP_
#define RSARL_CROWD_POLICY_HPP_

#include <optional>
#include <span>
#include <vector>

#include "rsarl/domain.hpp"

namespace rsarl {

/// Velocity-space constraint; the permitted region is {v : (v - point) . normal >= 0}.
struct HalfPlane {
  Vec2 point;
  Vec2 normal;

  /// Boundary direction with the permitted side on its left.
  Vec2 direction() const { return {normal.y, -normal.x}; }
  /// Signed distance of v outside the half-plane; <= 0 when v is permitted.
  double violation(const Vec2& v) const { return -(v - point).dot(normal); }
};

struct OrcaConfig {
  double tau = 5.0;             // s, time horizon
  double dt = 0.25;             // s
  double neighbor_dist = 10.0;  // m
  int max_neighbors = 10;
  double safety_margin = 0.02;  // m, added to the combined radius
  bool robot_visible = true;    // humans avoid the robot as a reciprocal agent
};

/// A neighbor together with the share of the avoidance this agent takes on:
/// 0.5 for a reciprocating agent, 1.0 for one that will not move.
struct OrcaNeighbor {
  ObservableState state;
  double responsibility = 0.5;
};

/// One half-plane per considered neighbor (the max_neighbors nearest within
/// neighbor_dist). Overlapping agents get a constraint that separates them within dt.
std::vector<HalfPlane> orca_halfplanes(const FullAgentState& self,
                                       std::span<const OrcaNeighbor> neighbors,
                                       const OrcaConfig& cfg);

/// All neighbors treated as reciprocating agents.
std::vector<HalfPlane> orca_halfplanes(const FullAgentState& self,
                                       std::span<const ObservableState> neighbors,
                                       const OrcaConfig& cfg);

/// Velocity within every half-plane and the max_speed disc closest to pref_vel.
/// If the constraints are infeasible, minimizes the largest violation instead.
Vec2 solve_velocity(std::span<const HalfPlane> halfplanes, const Vec2& pref_vel, double max_speed);

/// Velocity pointing at the agent's goal with speed min(v_pref, distance/dt).
Vec2 preferred_velocity(const FullAgentState& agent, double dt);

/// ORCA velocity for a single agent given its neighbors.
Vec2 orca_velocity(const FullAgentState& self, std::span<const OrcaNeighbor> neighbors,
                   const OrcaConfig& cfg);

/// New velocity for every human, all computed from the same snapshot. Humans with
/// v_pref == 0 are static and always get (0, 0); others avoid them with full
/// responsibility. The robot, when given and visible, is avoided like a human.
std::vector<Vec2> crowd_step(std::span<const FullAgentState> humans,
                             const std::optional<ObservableState>& robot, const OrcaConfig& cfg);

}  // namespace rsarl

#endif  // RSARL_CROWD_POLICY_HPP_
