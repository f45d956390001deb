#ifndef RSARL_DOMAIN_HPP_
#define RSARL_DOMAIN_HPP_

#include <cmath>
#include <numbers>
#include <vector>

namespace rsarl {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  /// z-component of the 2D cross product (a.k.a. determinant).
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  constexpr double norm_sq() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Rotates v counterclockwise by angle (rad).
inline Vec2 rotated(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Observable part of an agent: position, velocity, radius.
struct ObservableState {
  double px = 0.0, py = 0.0;
  double vx = 0.0, vy = 0.0;
  double radius = 0.3;

  Vec2 position() const { return {px, py}; }
  Vec2 velocity() const { return {vx, vy}; }
  bool operator==(const ObservableState&) const = default;
};

/// Observable plus hidden state (goal, preferred speed, heading).
struct FullAgentState {
  double px = 0.0, py = 0.0;
  double vx = 0.0, vy = 0.0;
  double radius = 0.3;
  double gx = 0.0, gy = 0.0;
  double v_pref = 1.0;
  double theta = 0.0;

  Vec2 position() const { return {px, py}; }
  Vec2 velocity() const { return {vx, vy}; }
  Vec2 goal() const { return {gx, gy}; }
  ObservableState observable() const { return {px, py, vx, vy, radius}; }
  bool operator==(const FullAgentState&) const = default;
};

/// Robot full state plus what the robot sees of every human. Human index is identity.
struct JointState {
  FullAgentState robot;
  std::vector<ObservableState> humans;

  bool operator==(const JointState&) const = default;
};

/// Unicycle command: forward speed and heading change applied over one decision step.
struct Action {
  double v = 0.0;
  double dtheta = 0.0;

  bool is_stop() const { return v == 0.0 && dtheta == 0.0; }
  bool operator==(const Action&) const = default;
};

/// Robot part of the robot-centric state: [d_g, v_pref, theta, r].
struct RobotFeatures {
  double goal_distance = 0.0;
  double v_pref = 0.0;
  /// Goal direction measured from the robot heading; zero when aimed at the goal.
  double goal_bearing = 0.0;
  double radius = 0.0;

  static constexpr int kSize = 4;
};

/// Per-human part in the robot frame (x-axis along the robot heading).
struct HumanFeatures {
  double px = 0.0, py = 0.0;
  double vx = 0.0, vy = 0.0;
  double radius = 0.0;
  double distance = 0.0;
  double combined_radius = 0.0;

  static constexpr int kSize = 7;
};

struct RotatedState {
  RobotFeatures robot;
  std::vector<HumanFeatures> humans;
};

RotatedState rotate_to_robot_frame(const JointState& state);

/// Stop action followed by n_headings moving actions at v_pref with heading
/// changes evenly spaced over [-dtheta_max, dtheta_max], ascending.
std::vector<Action> build_action_space(double v_pref, int n_headings, double dtheta_max);

/// Surface-to-surface clearance between the robot and the closest human;
/// +infinity with no humans. Negative means overlap.
double min_clearance(const JointState& state);

}  // namespace rsarl

#endif  // RSARL_DOMAIN_HPP_
