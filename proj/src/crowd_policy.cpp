#include "rsarl/crowd_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsarl {
namespace {

constexpr double kEpsilon = 1e-9;

// Internal line form: point plus unit direction, permitted side on the left.
struct Line {
  Vec2 point;
  Vec2 direction;
};

Vec2 normalized(const Vec2& v) { return v / v.norm(); }

Line to_line(const HalfPlane& h) { return {h.point, h.direction()}; }

bool outside(const Line& line, const Vec2& v) {
  return line.direction.cross(line.point - v) > 0.0;
}

// Optimizes along line `line_no` subject to lines [0, line_no) and the speed disc.
bool solve_on_line(std::span<const Line> lines, std::size_t line_no, double radius,
                   const Vec2& opt, bool direction_opt, Vec2& result) {
  const Line& line = lines[line_no];
  const double dot = line.point.dot(line.direction);
  const double discriminant = dot * dot + radius * radius - line.point.norm_sq();
  if (discriminant < 0.0) return false;  // line misses the speed disc

  const double sqrt_disc = std::sqrt(discriminant);
  double t_left = -dot - sqrt_disc;
  double t_right = -dot + sqrt_disc;

  for (std::size_t i = 0; i < line_no; ++i) {
    const double denominator = line.direction.cross(lines[i].direction);
    const double numerator = lines[i].direction.cross(line.point - lines[i].point);
    if (std::fabs(denominator) <= kEpsilon) {
      if (numerator < 0.0) return false;  // parallel and on the wrong side
      continue;
    }
    const double t = numerator / denominator;
    if (denominator >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) return false;
  }

  if (direction_opt) {
    result = line.point + line.direction * (opt.dot(line.direction) > 0.0 ? t_right : t_left);
  } else {
    const double t = line.direction.dot(opt - line.point);
    result = line.point + line.direction * std::clamp(t, t_left, t_right);
  }
  return true;
}

// Incremental 2D LP. Returns the index of the first line that could not be
// satisfied, or lines.size() on success.
std::size_t solve_lp(std::span<const Line> lines, double radius, const Vec2& opt,
                     bool direction_opt, Vec2& result) {
  if (direction_opt) {
    result = opt * radius;
  } else if (opt.norm_sq() > radius * radius) {
    result = normalized(opt) * radius;
  } else {
    result = opt;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (outside(lines[i], result)) {
      const Vec2 previous = result;
      if (!solve_on_line(lines, i, radius, opt, direction_opt, result)) {
        result = previous;
        return i;
      }
    }
  }
  return lines.size();
}

// Infeasible case: minimize the maximum violation over lines [begin, n).
void solve_min_violation(std::span<const Line> lines, std::size_t begin, double radius,
                         Vec2& result) {
  double distance = 0.0;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (lines[i].direction.cross(lines[i].point - result) <= distance) continue;

    std::vector<Line> projected;
    projected.reserve(i);
    for (std::size_t j = 0; j < i; ++j) {
      Line line;
      const double determinant = lines[i].direction.cross(lines[j].direction);
      if (std::fabs(determinant) <= kEpsilon) {
        if (lines[i].direction.dot(lines[j].direction) > 0.0) continue;  // same direction
        line.point = (lines[i].point + lines[j].point) * 0.5;
      } else {
        line.point = lines[i].point +
                     lines[i].direction *
                         (lines[j].direction.cross(lines[i].point - lines[j].point) / determinant);
      }
      line.direction = normalized(lines[j].direction - lines[i].direction);
      projected.push_back(line);
    }

    const Vec2 previous = result;
    const Vec2 inward{-lines[i].direction.y, lines[i].direction.x};
    if (solve_lp(projected, radius, inward, true, result) < projected.size()) {
      // Can only happen through floating-point error; keep the last good value.
      result = previous;
    }
    distance = lines[i].direction.cross(lines[i].point - result);
  }
}

HalfPlane make_halfplane(const Vec2& point, const Vec2& direction) {
  return {point, Vec2{-direction.y, direction.x}};
}

}  // namespace

std::vector<HalfPlane> orca_halfplanes(const FullAgentState& self,
                                       std::span<const OrcaNeighbor> neighbors,
                                       const OrcaConfig& cfg) {
  const Vec2 position = self.position();
  const Vec2 velocity = self.velocity();

  // Nearest max_neighbors within range; ties keep input order.
  std::vector<std::size_t> order;
  std::vector<double> dist_sq(neighbors.size());
  const double range_sq = cfg.neighbor_dist * cfg.neighbor_dist;
  for (std::size_t i = 0; i < neighbors.size(); ++i) {
    dist_sq[i] = (neighbors[i].state.position() - position).norm_sq();
    if (dist_sq[i] < range_sq) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist_sq[a] < dist_sq[b]; });
  if (order.size() > static_cast<std::size_t>(std::max(cfg.max_neighbors, 0))) {
    order.resize(static_cast<std::size_t>(std::max(cfg.max_neighbors, 0)));
  }

  const double inv_tau = 1.0 / cfg.tau;
  std::vector<HalfPlane> planes;
  planes.reserve(order.size());
  for (const std::size_t idx : order) {
    const ObservableState& other = neighbors[idx].state;
    const Vec2 rel_pos = other.position() - position;
    const Vec2 rel_vel = velocity - other.velocity();
    const double d_sq = rel_pos.norm_sq();
    const double combined = self.radius + other.radius + cfg.safety_margin;
    const double combined_sq = combined * combined;

    Vec2 direction;
    Vec2 u;
    if (d_sq > combined_sq) {
      const Vec2 w = rel_vel - rel_pos * inv_tau;  // from cut-off center to relative velocity
      const double w_len_sq = w.norm_sq();
      const double dot1 = w.dot(rel_pos);
      if (dot1 < 0.0 && dot1 * dot1 > combined_sq * w_len_sq) {
        // Closest boundary point lies on the cut-off circle.
        const double w_len = std::sqrt(w_len_sq);
        const Vec2 unit_w = w / w_len;
        direction = {unit_w.y, -unit_w.x};
        u = unit_w * (combined * inv_tau - w_len);
      } else {
        // Project on a leg. Exactly on the cone axis picks the left leg.
        const double leg = std::sqrt(d_sq - combined_sq);
        if (rel_pos.cross(w) >= 0.0) {
          direction = Vec2{rel_pos.x * leg - rel_pos.y * combined,
                           rel_pos.x * combined + rel_pos.y * leg} / d_sq;
        } else {
          direction = -(Vec2{rel_pos.x * leg + rel_pos.y * combined,
                             -rel_pos.x * combined + rel_pos.y * leg} / d_sq);
        }
        u = direction * rel_vel.dot(direction) - rel_vel;
      }
    } else {
      // Already overlapping: resolve within one step instead of tau.
      const double inv_dt = 1.0 / cfg.dt;
      const Vec2 w = rel_vel - rel_pos * inv_dt;
      const double w_len = w.norm();
      const Vec2 unit_w = w_len > 0.0 ? w / w_len : Vec2{-1.0, 0.0};
      direction = {unit_w.y, -unit_w.x};
      u = unit_w * (combined * inv_dt - w_len);
    }
    planes.push_back(make_halfplane(velocity + u * neighbors[idx].responsibility, direction));
  }
  return planes;
}

std::vector<HalfPlane> orca_halfplanes(const FullAgentState& self,
                                       std::span<const ObservableState> neighbors,
                                       const OrcaConfig& cfg) {
  std::vector<OrcaNeighbor> wrapped;
  wrapped.reserve(neighbors.size());
  for (const ObservableState& n : neighbors) wrapped.push_back({n, 0.5});
  return orca_halfplanes(self, wrapped, cfg);
}

Vec2 solve_velocity(std::span<const HalfPlane> halfplanes, const Vec2& pref_vel,
                    double max_speed) {
  std::vector<Line> lines;
  lines.reserve(halfplanes.size());
  for (const HalfPlane& h : halfplanes) lines.push_back(to_line(h));

  Vec2 result;
  const std::size_t failed = solve_lp(lines, max_speed, pref_vel, false, result);
  if (failed < lines.size()) solve_min_violation(lines, failed, max_speed, result);

  // Guard the disc bound against rounding in the LP.
  const double speed = result.norm();
  if (speed > max_speed) result = result * (max_speed / speed);
  return result;
}

Vec2 preferred_velocity(const FullAgentState& agent, double dt) {
  const Vec2 to_goal = agent.goal() - agent.position();
  const double dist = to_goal.norm();
  if (dist <= 0.0 || agent.v_pref <= 0.0) return {};
  const double speed = std::min(agent.v_pref, dist / dt);
  return to_goal * (speed / dist);
}

Vec2 orca_velocity(const FullAgentState& self, std::span<const OrcaNeighbor> neighbors,
                   const OrcaConfig& cfg) {
  if (self.v_pref <= 0.0) return {};
  const auto planes = orca_halfplanes(self, neighbors, cfg);
  return solve_velocity(planes, preferred_velocity(self, cfg.dt), self.v_pref);
}

std::vector<Vec2> crowd_step(std::span<const FullAgentState> humans,
                             const std::optional<ObservableState>& robot,
                             const OrcaConfig& cfg) {
  std::vector<Vec2> velocities(humans.size());
  std::vector<OrcaNeighbor> neighbors;
  neighbors.reserve(humans.size());
  for (std::size_t i = 0; i < humans.size(); ++i) {
    if (humans[i].v_pref <= 0.0) continue;
    neighbors.clear();
    for (std::size_t j = 0; j < humans.size(); ++j) {
      if (j == i) continue;
      neighbors.push_back({humans[j].observable(), humans[j].v_pref <= 0.0 ? 1.0 : 0.5});
    }
    if (robot && cfg.robot_visible) neighbors.push_back({*robot, 0.5});
    velocities[i] = orca_velocity(humans[i], neighbors, cfg);
  }
  return velocities;
}

}  // namespace rsarl
