#include "rsarl/scenario.hpp"

#include <cmath>
#include <numbers>

namespace rsarl {
namespace {

constexpr int kMaxAttempts = 10000;
constexpr double kExtraClearance = 0.2;  // m, beyond touching

Vec2 polar(double radius, double angle_deg) {
  const double a = deg_to_rad(angle_deg);
  return {radius * std::cos(a), radius * std::sin(a)};
}

Vec2 jitter_disc(Rng& rng, double radius) {
  if (radius <= 0.0) return {};
  const double r = radius * std::sqrt(uniform01(rng));
  const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  return {r * std::cos(a), r * std::sin(a)};
}

bool clear_of(const Vec2& p, const std::vector<Vec2>& taken, double min_dist) {
  for (const Vec2& q : taken) {
    if ((p - q).norm() < min_dist) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(EnvType env) {
  switch (env) {
    case EnvType::none: return "none";
    case EnvType::separated: return "separated";
    case EnvType::two_barriers: return "two_barriers";
    case EnvType::concave: return "concave";
  }
  return "none";
}

EnvType env_from_string(std::string_view name) {
  if (name == "none") return EnvType::none;
  if (name == "separated") return EnvType::separated;
  if (name == "two_barriers") return EnvType::two_barriers;
  if (name == "concave") return EnvType::concave;
  throw std::invalid_argument("unknown environment '" + std::string(name) +
                              "' (expected none, separated, two_barriers or concave)");
}

StaticLayouts StaticLayouts::defaults() {
  StaticLayouts l;
  for (const double deg : {90.0, 162.0, 234.0, 306.0, 18.0}) l.separated.push_back(polar(2.0, deg));
  l.two_barriers = {{-0.35, 1.0}, {0.35, 1.0}, {-0.7, -1.0}, {0.0, -1.0}, {0.7, -1.0}};
  for (const double deg : {0.0, 45.0, 90.0, 135.0, 180.0}) l.concave.push_back(polar(1.2, deg));
  return l;
}

const std::vector<Vec2>& StaticLayouts::layout(EnvType env) const {
  static const std::vector<Vec2> kEmpty;
  switch (env) {
    case EnvType::separated: return separated;
    case EnvType::two_barriers: return two_barriers;
    case EnvType::concave: return concave;
    case EnvType::none: break;
  }
  return kEmpty;
}

void ScenarioConfig::validate() const {
  if (!(circle_radius > 0.0)) throw std::invalid_argument("scenario.circle_radius: must be > 0");
  if (n_dynamic < 0) throw std::invalid_argument("scenario.n_dynamic: must be >= 0");
  if (n_static < 0) throw std::invalid_argument("scenario.n_static: must be >= 0");
  if (!(agent_radius > 0.0)) throw std::invalid_argument("scenario.agent_radius: must be > 0");
  if (!(v_pref >= 0.0)) throw std::invalid_argument("scenario.v_pref: must be >= 0");
  if (!(perturbation >= 0.0)) throw std::invalid_argument("scenario.perturbation: must be >= 0");
  if (env != EnvType::none &&
      static_cast<std::size_t>(n_static) > layouts.layout(env).size()) {
    throw std::invalid_argument("scenario.n_static: layout '" + std::string(to_string(env)) +
                                "' has only " + std::to_string(layouts.layout(env).size()) +
                                " positions");
  }
}

JointState Scenario::joint_state() const {
  JointState s;
  s.robot = robot;
  s.humans.reserve(humans.size());
  for (const FullAgentState& h : humans) s.humans.push_back(h.observable());
  return s;
}

Scenario generate_scenario(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  const double r = cfg.agent_radius;
  const double min_dist = 2.0 * r + kExtraClearance;

  Scenario sc;
  sc.env = cfg.env;

  const Vec2 start = cfg.robot_start + jitter_disc(rng, cfg.perturbation);
  const Vec2 goal = cfg.robot_goal + jitter_disc(rng, cfg.perturbation);
  sc.robot.px = start.x;
  sc.robot.py = start.y;
  sc.robot.gx = goal.x;
  sc.robot.gy = goal.y;
  sc.robot.radius = r;
  sc.robot.v_pref = cfg.v_pref;
  sc.robot.theta = std::atan2(goal.y - start.y, goal.x - start.x);

  // Static humans first so dynamic placement can avoid them.
  std::vector<Vec2> statics;
  const std::vector<Vec2> endpoints{start, goal};
  int attempts = 0;
  if (cfg.env == EnvType::none) {
    const double area = cfg.circle_radius / 2.0;
    while (static_cast<int>(statics.size()) < cfg.n_static) {
      if (++attempts > kMaxAttempts) {
        throw ScenarioError("generate_scenario: could not place " + std::to_string(cfg.n_static) +
                            " static humans");
      }
      const Vec2 p = jitter_disc(rng, area);
      if (clear_of(p, statics, min_dist) && clear_of(p, endpoints, min_dist)) statics.push_back(p);
    }
  } else {
    const auto& layout = cfg.layouts.layout(cfg.env);
    const double jitter = cfg.env == EnvType::separated ? cfg.layouts.separated_jitter : 0.0;
    for (int i = 0; i < cfg.n_static; ++i) {
      Vec2 p = layout[static_cast<std::size_t>(i)];
      if (jitter > 0.0) {
        p.x += uniform(rng, -jitter, jitter);
        p.y += uniform(rng, -jitter, jitter);
      }
      statics.push_back(p);
    }
  }

  std::vector<Vec2> taken_starts = statics;
  taken_starts.push_back(start);
  taken_starts.push_back(goal);
  std::vector<Vec2> taken_goals = taken_starts;
  while (static_cast<int>(sc.humans.size()) < cfg.n_dynamic) {
    if (++attempts > kMaxAttempts) {
      throw ScenarioError("generate_scenario: could not place " + std::to_string(cfg.n_dynamic) +
                          " dynamic humans on a circle of radius " +
                          std::to_string(cfg.circle_radius));
    }
    const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const Vec2 p{cfg.circle_radius * std::cos(angle), cfg.circle_radius * std::sin(angle)};
    const Vec2 g = -p;
    if (!clear_of(p, taken_starts, min_dist) || !clear_of(g, taken_goals, min_dist)) continue;
    taken_starts.push_back(p);
    taken_goals.push_back(g);

    FullAgentState h;
    h.px = p.x;
    h.py = p.y;
    h.gx = g.x;
    h.gy = g.y;
    h.radius = r;
    h.v_pref = cfg.v_pref;
    h.theta = std::atan2(g.y - p.y, g.x - p.x);
    sc.humans.push_back(h);
  }

  for (const Vec2& p : statics) {
    FullAgentState h;
    h.px = h.gx = p.x;
    h.py = h.gy = p.y;
    h.radius = r;
    h.v_pref = 0.0;
    sc.static_ids.push_back(sc.humans.size());
    sc.humans.push_back(h);
  }
  // Drawn last so the rest of the layout does not depend on the flag.
  if (cfg.random_heading) sc.robot.theta = uniform(rng, -std::numbers::pi, std::numbers::pi);
  return sc;
}

Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Scenario sc = generate_scenario(cfg, rng);
  sc.seed = seed;
  return sc;
}

}  // namespace rsarl
