#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "rsarl/scenario.hpp"

using namespace rsarl;

TEST_CASE("same seed, same scenario") {
  const ScenarioConfig cfg;
  const Scenario a = generate_scenario(cfg, 123);
  const Scenario b = generate_scenario(cfg, 123);
  CHECK(a.robot == b.robot);
  CHECK(a.humans == b.humans);
  CHECK(a.static_ids == b.static_ids);
  CHECK(a.seed == 123);
  const Scenario c = generate_scenario(cfg, 124);
  CHECK_FALSE(c.humans == a.humans);
}

TEST_CASE("dynamic humans cross the circle") {
  for (const EnvType env : {EnvType::none, EnvType::separated, EnvType::two_barriers,
                            EnvType::concave}) {
    ScenarioConfig cfg;
    cfg.env = env;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Scenario sc = generate_scenario(cfg, seed);
      REQUIRE(sc.humans.size() == 15);
      REQUIRE(sc.static_ids.size() == 5);
      std::vector<Vec2> starts{sc.robot.position()};
      for (std::size_t i = 0; i < 10; ++i) {
        const auto& h = sc.humans[i];
        CHECK(h.gx == -h.px);
        CHECK(h.gy == -h.py);
        CHECK(h.position().norm() == doctest::Approx(4.0));
        CHECK(h.v_pref == 1.0);
        starts.push_back(h.position());
      }
      const std::size_t n_moving = starts.size();
      for (const std::size_t id : sc.static_ids) {
        const auto& h = sc.humans[id];
        CHECK(id >= 10);
        CHECK(h.v_pref == 0.0);
        CHECK(h.vx == 0.0);
        CHECK(h.vy == 0.0);
        starts.push_back(h.position());
      }
      // Layout statics may sit closer to each other than the placement clearance.
      for (std::size_t i = 0; i < starts.size(); ++i) {
        for (std::size_t j = std::max(i + 1, i < n_moving ? 0 : starts.size()); j < starts.size(); ++j) {
          CHECK((starts[i] - starts[j]).norm() >= 0.8 - 1e-12);
        }
      }
      CHECK((sc.robot.position() - Vec2{0, -4}).norm() <= 0.5);
      CHECK((sc.robot.goal() - Vec2{0, 4}).norm() <= 0.5);
      CHECK(sc.robot.radius == 0.3);
      CHECK(sc.env == env);
    }
  }
}

TEST_CASE("concave layout is an arc opening toward the start") {
  ScenarioConfig cfg;
  cfg.env = EnvType::concave;
  cfg.n_dynamic = 0;
  const Scenario sc = generate_scenario(cfg, 1);
  REQUIRE(sc.static_ids.size() == 5);
  double sum_x = 0.0;
  for (const std::size_t id : sc.static_ids) {
    const auto& h = sc.humans[id];
    CHECK(h.position().norm() == doctest::Approx(1.2));
    CHECK(h.py >= -1e-12);
    sum_x += h.px;
  }
  CHECK(std::fabs(sum_x) < 1e-9);
  CHECK(sc.humans[sc.static_ids[2]].px == doctest::Approx(0.0));
  CHECK(sc.humans[sc.static_ids[2]].py == doctest::Approx(1.2));
}

TEST_CASE("two barriers and separated layouts") {
  ScenarioConfig cfg;
  cfg.n_dynamic = 0;
  cfg.env = EnvType::two_barriers;
  const Scenario tb = generate_scenario(cfg, 2);
  int upper = 0, lower = 0;
  for (const std::size_t id : tb.static_ids) {
    const double y = tb.humans[id].py;
    upper += y == 1.0;
    lower += y == -1.0;
  }
  CHECK(upper == 2);
  CHECK(lower == 3);

  cfg.env = EnvType::separated;
  const Scenario sep = generate_scenario(cfg, 3);
  const auto& ring = cfg.layouts.separated;
  for (std::size_t k = 0; k < 5; ++k) {
    const Vec2 d = sep.humans[sep.static_ids[k]].position() - ring[k];
    CHECK(std::fabs(d.x) <= 0.2);
    CHECK(std::fabs(d.y) <= 0.2);
  }
}

TEST_CASE("fewer statics take the first layout entries") {
  ScenarioConfig cfg;
  cfg.env = EnvType::two_barriers;
  cfg.n_static = 3;
  cfg.n_dynamic = 5;
  const Scenario sc = generate_scenario(cfg, 4);
  REQUIRE(sc.static_ids.size() == 3);
  CHECK(sc.humans[sc.static_ids[0]].position() == Vec2{-0.35, 1.0});
  CHECK(sc.humans[sc.static_ids[2]].position() == Vec2{-0.7, -1.0});
}

TEST_CASE("infeasible placement is reported") {
  ScenarioConfig cfg;
  cfg.circle_radius = 1.0;
  cfg.n_dynamic = 30;
  CHECK_THROWS_AS(generate_scenario(cfg, 1), ScenarioError);
  cfg = ScenarioConfig{};
  cfg.n_static = 6;
  CHECK_THROWS_AS(generate_scenario(cfg, 1), std::invalid_argument);
}

TEST_CASE("environment names") {
  for (const EnvType e : {EnvType::none, EnvType::separated, EnvType::two_barriers,
                          EnvType::concave}) {
    CHECK(env_from_string(to_string(e)) == e);
  }
  CHECK_THROWS_AS(env_from_string("maze"), std::invalid_argument);
}

TEST_CASE("random heading changes only the robot heading") {
  ScenarioConfig cfg;
  ScenarioConfig turned = cfg;
  turned.random_heading = true;
  bool differs = false;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario a = generate_scenario(cfg, seed);
    const Scenario b = generate_scenario(turned, seed);
    CHECK(a.humans == b.humans);
    CHECK(a.robot.position() == b.robot.position());
    CHECK(a.robot.gx == b.robot.gx);
    CHECK(a.robot.gy == b.robot.gy);
    CHECK(std::abs(b.robot.theta) <= 3.1415926535897932);
    differs = differs || a.robot.theta != b.robot.theta;
  }
  CHECK(differs);
}
