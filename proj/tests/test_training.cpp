#include <doctest.h>

#include <stdexcept>

#include <array>
#include <numeric>

#include "helpers.hpp"
#include "rsarl/training.hpp"

using namespace rsarl;
using rsarl::test::robot_at;

namespace {

NetworkConfig small_net() {
  NetworkConfig c;
  c.embedding = {16, 12};
  c.attention = {12, 1};
  c.head = {16, 12, 1};
  c.map.grid_side = 2;
  return c;
}

/// V = -goal_distance, everything else zero.
ValueNetParams goal_seeking_net() {
  NetworkConfig c = small_net();
  c.head = {1};
  ValueNetParams p = ValueNetParams::zeros(c);
  p.head.layers[0].weight(0, 0) = -1.0;
  return p;
}

ScenarioConfig empty_scenario() {
  ScenarioConfig s;
  s.n_dynamic = 0;
  s.n_static = 0;
  s.env = EnvType::none;
  return s;
}

}  // namespace

TEST_CASE("epsilon schedule") {
  const TrainConfig cfg;
  CHECK(epsilon_at(0, cfg) == 0.5);
  CHECK(epsilon_at(4000, cfg) == doctest::Approx(0.1));
  CHECK(epsilon_at(9000, cfg) == doctest::Approx(0.1));
  CHECK(epsilon_at(2000, cfg) == doctest::Approx(0.3));
  double prev = 1.0;
  for (int e = 0; e < 6000; e += 37) {
    const double eps = epsilon_at(e, cfg);
    CHECK(eps <= prev);
    CHECK(eps >= cfg.eps_end);
    CHECK(eps <= cfg.eps_start);
    prev = eps;
  }
}

TEST_CASE("td target") {
  const DiscountRule rule{0.9, 1.0, 0.25};
  CHECK(rule.factor() == doctest::Approx(0.97400).epsilon(1e-5));
  CHECK(std::fabs(rule.factor() - std::pow(0.9, 0.25)) < 1e-15);
  CHECK(td_target(0.9, 5.0, true, rule) == 0.9);
  CHECK(td_target(0.3, 0.0, false, rule) == 0.3);
  CHECK(td_target(0.1, 2.0, false, rule) == doctest::Approx(0.1 + rule.factor() * 2.0));
  CHECK(td_target(0.1, 2.0, false, rule) > td_target(0.1, 1.9, false, rule));
}

TEST_CASE("discounted returns") {
  const std::vector<double> r{0.0, 0.0, 1.0};
  const auto out = discounted_returns(r, 0.5);
  CHECK(out == std::vector<double>{0.25, 0.5, 1.0});
  CHECK(discounted_returns(std::vector<double>{}, 0.5).empty());
}

TEST_CASE("greedy selection follows the value function") {
  const ValueNetParams p = goal_seeking_net();
  EpisodeConfig ep;
  LookaheadModel m = make_lookahead(p, ep, 0.9, 1.0);
  JointState s;
  s.robot = robot_at(0, 0, 0, 5, 0.5);
  const auto actions = action_space(ep, 1.0);
  const PolicyContext ctx;
  const Action a = select_action(m, s, actions, 0.0, ctx);
  // Goal bearing is about +5.7 deg; the nearest heading change is +5.56 deg.
  CHECK(a == actions[8]);
  const auto scores = action_scores(m, s, actions, ctx);
  CHECK(*std::max_element(scores.begin(), scores.end()) == scores[8]);

  ValueNetParams shifted = p;
  shifted.head.layers[0].bias(0) = 42.0;
  LookaheadModel ms = make_lookahead(shifted, ep, 0.9, 1.0);
  CHECK(select_action(ms, s, actions, 0.0, ctx) == a);
}

TEST_CASE("ties go to the lowest index") {
  const ValueNetParams p = ValueNetParams::zeros(small_net());
  EpisodeConfig ep;
  const LookaheadModel m = make_lookahead(p, ep, 0.9, 1.0);
  JointState s;
  s.robot = robot_at(0, 0, 0, 5, 0);
  const auto actions = action_space(ep, 1.0);
  CHECK(select_action(m, s, actions, 0.0, {}) == actions[0]);
}

TEST_CASE("full exploration is uniform") {
  const ValueNetParams p = ValueNetParams::zeros(small_net());
  EpisodeConfig ep;
  const LookaheadModel m = make_lookahead(p, ep, 0.9, 1.0);
  JointState s;
  s.robot = robot_at(0, 0, 0, 5, 0);
  const auto actions = action_space(ep, 1.0);
  Rng rng(77);
  PolicyContext ctx;
  ctx.rng = &rng;
  std::array<int, 11> counts{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Action a = select_action(m, s, actions, 1.0, ctx);
    const auto it = std::find(actions.begin(), actions.end(), a);
    ++counts[static_cast<std::size_t>(it - actions.begin())];
  }
  double chi2 = 0.0;
  const double expected = n / 11.0;
  for (const int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 99th percentile of chi-square with 10 degrees of freedom.
  CHECK(chi2 < 23.209);
  CHECK_THROWS_AS(select_action(m, s, actions, 0.5, {}), std::invalid_argument);
}

TEST_CASE("demonstration targets are discounted returns") {
  EpisodeConfig ep;
  const DiscountRule rule{0.9, 1.0, ep.step.dt};
  const LocalMapConfig maps;
  const auto set = collect_demonstrations(2, seeded_scenarios(empty_scenario(), 5, 1), ep, maps,
                                          rule, 5);
  REQUIRE(set.episodes.size() == 2);
  std::size_t offset = 0;
  for (const EpisodeRecord& rec : set.episodes) {
    REQUIRE(rec.outcome == Outcome::success);
    const std::size_t T = rec.steps();
    const double terminal = set.experiences[offset + T - 1].target;
    CHECK(std::fabs(terminal - (1.0 - 0.1 * rec.nav_time / 25.0)) < 1e-12);
    for (std::size_t k = 0; k < T; ++k) {
      const double expected = std::pow(rule.factor(), static_cast<double>(T - 1 - k)) * terminal;
      CHECK(std::fabs(set.experiences[offset + k].target - expected) < 1e-12);
    }
    offset += T;
  }
  CHECK(offset == set.experiences.size());
  CHECK(collect_demonstrations(0, seeded_scenarios(empty_scenario(), 5, 1), ep, maps, rule, 5)
            .experiences.empty());
}

TEST_CASE("adam matches a hand computation") {
  Adam opt(0.1);
  std::vector<double> x{1.0, -2.0};
  const std::vector<double> g{0.5, -4.0};
  opt.step(x, g);
  // First step: m_hat = g, v_hat = g^2, update = lr * sign(g).
  CHECK(x[0] == doctest::Approx(0.9).epsilon(1e-7));
  CHECK(x[1] == doctest::Approx(-1.9).epsilon(1e-7));
}

TEST_CASE("imitation fit on identical pairs converges") {
  const NetworkConfig cfg = small_net();
  Rng rng(14);
  const ValueNetParams p0 = ValueNetParams::initialize(cfg, rng);
  const NetInput in = encode(test::random_joint_state(rng, 3), cfg.map);
  const std::vector<Experience> data(64, Experience{in, 0.8});
  TrainConfig tc;
  tc.il_epochs = 50;
  tc.batch_size = 16;
  tc.il_lr = 0.01;
  std::vector<double> losses;
  Rng shuffle(1);
  const ValueNetParams fit = imitation_fit(p0, data, tc, shuffle, &losses);
  REQUIRE(losses.size() == 50);
  CHECK(losses.back() < 1e-4);
  CHECK(dataset_loss(fit, data) < 1e-4);
  int rises = 0;
  // Near the optimum Adam jitters; only count rises before convergence.
  for (std::size_t i = 1; i < losses.size(); ++i) rises += losses[i - 1] > 1e-3 && losses[i] > losses[i - 1];
  CHECK(rises <= 5);

  tc.il_lr = 0.0;
  Rng shuffle2(1);
  CHECK(imitation_fit(p0, data, tc, shuffle2).flatten() == p0.flatten());
}

TEST_CASE("imitation fit lowers the training loss") {
  const NetworkConfig cfg = small_net();
  Rng rng(15);
  const ValueNetParams p0 = ValueNetParams::initialize(cfg, rng);
  std::vector<Experience> data;
  for (int i = 0; i < 40; ++i) {
    const JointState s = test::random_joint_state(rng, 1 + i % 4);
    data.push_back({encode(s, cfg.map), std::exp(-0.2 * (s.robot.goal() - s.robot.position()).norm())});
  }
  TrainConfig tc;
  tc.il_epochs = 20;
  tc.batch_size = 10;
  Rng shuffle(3);
  const ValueNetParams fit = imitation_fit(p0, data, tc, shuffle);
  CHECK(dataset_loss(fit, data) <= dataset_loss(p0, data));
  CHECK_THROWS_AS(imitation_fit(p0, std::vector<Experience>{}, tc, shuffle), std::invalid_argument);
}

TEST_CASE("replay ring evicts the oldest") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.push({NetInput{}, static_cast<double>(i)});
  CHECK(buf.size() == 3);
  std::vector<double> held;
  for (std::size_t i = 0; i < buf.size(); ++i) held.push_back(buf[i].target);
  std::sort(held.begin(), held.end());
  CHECK(held == std::vector<double>{2.0, 3.0, 4.0});
  Rng rng(1);
  for (const Experience* e : buf.sample(50, rng)) CHECK(e->target >= 2.0);
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
}

TEST_CASE("divergence is reported") {
  const NetworkConfig cfg = small_net();
  Rng rng(16);
  ValueNetParams p = ValueNetParams::initialize(cfg, rng);
  const Experience bad{encode(test::random_joint_state(rng, 2), cfg.map),
                       std::numeric_limits<double>::infinity()};
  const std::vector<const Experience*> batch{&bad};
  Adam opt(0.01);
  CHECK_THROWS_AS(train_step(p, batch, opt), DivergenceError);
}

TEST_CASE("log line fields") {
  const std::string line = format_log_line({3, Outcome::collision, -0.25, 17, 0.5, 0.4});
  CHECK(line ==
        R"({"episode":3,"outcome":"collision","return":-0.25,"steps":17,"td_loss":0.5,"epsilon":0.4})");
}

TEST_CASE("training config validation names the field") {
  TrainConfig tc;
  tc.gamma = 1.0;
  try {
    tc.validate();
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).rfind("train.gamma", 0) == 0);
  }
}

TEST_CASE("rl training is deterministic") {
  TrainConfig tc;
  tc.rl_episodes = 6;
  tc.eps_decay_episodes = 4;
  tc.batch_size = 8;
  tc.train_batches = 2;
  tc.target_sync_episodes = 2;
  tc.seed = 9;
  ScenarioConfig sc;
  sc.n_dynamic = 2;
  sc.n_static = 1;
  EpisodeConfig ep;
  ep.reward.t_limit = 5.0;
  Rng rng(2);
  const ValueNetParams p0 = ValueNetParams::initialize(small_net(), rng);
  const auto a = rl_train(p0, tc, seeded_scenarios(sc, 9, 2), ep);
  const auto b = rl_train(p0, tc, seeded_scenarios(sc, 9, 2), ep);
  REQUIRE(a.log.size() == 6);
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(format_log_line(a.log[i]) == format_log_line(b.log[i]));
    CHECK(a.log[i].epsilon == epsilon_at(static_cast<int>(i), tc));
  }
  CHECK(a.params.flatten() == b.params.flatten());
  CHECK(a.params.flatten() != p0.flatten());
}
