#ifndef RSARL_SCENARIO_HPP_
#define RSARL_SCENARIO_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rsarl/domain.hpp"
#include "rsarl/random.hpp"

namespace rsarl {

enum class EnvType { none, separated, two_barriers, concave };

std::string_view to_string(EnvType env);
/// Throws std::invalid_argument for unknown names.
EnvType env_from_string(std::string_view name);

/// Static-human layouts, one list of positions per environment. A scenario with
/// n_static humans uses the first n_static entries of its environment's list.
struct StaticLayouts {
  /// Five statics on a radius-2 ring at 90, 162, 234, 306, 18 degrees.
  std::vector<Vec2> separated;
  /// Rows of 2 (y = +1) and 3 (y = -1) with 0.7 m spacing.
  std::vector<Vec2> two_barriers;
  /// Five statics on a 1.2 m arc spanning 180 degrees, opening toward -y.
  std::vector<Vec2> concave;
  /// Uniform per-axis jitter (m) applied to the separated layout.
  double separated_jitter = 0.2;

  static StaticLayouts defaults();
  const std::vector<Vec2>& layout(EnvType env) const;
  bool operator==(const StaticLayouts&) const = default;
};

struct ScenarioConfig {
  double circle_radius = 4.0;  // m
  int n_dynamic = 10;
  int n_static = 5;
  EnvType env = EnvType::separated;
  Vec2 robot_start{0.0, -4.0};
  Vec2 robot_goal{0.0, 4.0};
  double perturbation = 0.5;  // m, radius of the start/goal jitter disc
  double agent_radius = 0.3;  // m
  double v_pref = 1.0;        // m/s
  std::uint64_t seed = 0;
  /// Start the robot at a uniformly random heading instead of facing its goal.
  bool random_heading = false;
  StaticLayouts layouts = StaticLayouts::defaults();

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  std::uint64_t seed = 0;
  EnvType env = EnvType::none;
  FullAgentState robot;
  /// Dynamic humans first, then static humans.
  std::vector<FullAgentState> humans;
  std::vector<std::size_t> static_ids;

  JointState joint_state() const;
};

/// Circle-crossing scenario: dynamic humans at rejection-sampled angles with
/// antipodal goals, statics from the environment layout (or sampled inside the
/// circle for EnvType::none), robot start and goal jittered within a disc.
/// Throws ScenarioError after 10,000 failed placement attempts.
Scenario generate_scenario(const ScenarioConfig& cfg, Rng& rng);

/// Same, seeded with `seed` (recorded in the result).
Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

}  // namespace rsarl

#endif  // RSARL_SCENARIO_HPP_
