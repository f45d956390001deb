#include <doctest.h>

#include <stdexcept>

#include "rsarl/evaluation.hpp"
#include "rsarl/training.hpp"

using namespace rsarl;

namespace {

EpisodeRecord fake(Outcome o, double nav, int steps, int disc) {
  EpisodeRecord r;
  r.outcome = o;
  r.nav_time = nav;
  r.actions.resize(static_cast<std::size_t>(steps));
  r.clearances.assign(static_cast<std::size_t>(steps), 1.0);
  for (int i = 0; i < disc; ++i) r.clearances[static_cast<std::size_t>(i)] = 0.1;
  r.discomfort_steps = disc;
  return r;
}

}  // namespace

TEST_CASE("fixture counts give the expected row") {
  const MetricsReport r = metrics_from_counts(400, 65, 35, 10.5, 4.0);
  CHECK(r.n_episodes == 500);
  CHECK(r.success_rate == doctest::Approx(0.80));
  CHECK(r.collision_rate == doctest::Approx(0.13));
  CHECK(r.timeout_rate == doctest::Approx(0.07));
  const std::string table = format_table("fixture", r);
  CHECK(table.find("0.80") != std::string::npos);
  CHECK(table.find("0.13") != std::string::npos);
  CHECK(table.find("0.07") != std::string::npos);
  CHECK(table.find("10.50") != std::string::npos);
  CHECK(table.find("4.00") != std::string::npos);
  CHECK(table.rfind("Method", 0) == 0);
}

TEST_CASE("metrics from records") {
  std::vector<EpisodeRecord> recs;
  recs.push_back(fake(Outcome::success, 10.0, 40, 2));
  recs.push_back(fake(Outcome::success, 12.0, 48, 0));
  recs.push_back(fake(Outcome::collision, 3.0, 12, 0));
  recs.push_back(fake(Outcome::timeout, 25.0, 100, 0));
  const MetricsReport r = compute_metrics(recs, 0.2);
  CHECK(r.success_rate == 0.5);
  CHECK(r.collision_rate == 0.25);
  CHECK(r.timeout_rate == 0.25);
  CHECK(r.success_rate + r.collision_rate + r.timeout_rate == doctest::Approx(1.0));
  REQUIRE(r.nav_time.has_value());
  CHECK(*r.nav_time == doctest::Approx(11.0));
  CHECK(r.disc_rate == doctest::Approx(100.0 * 2.0 / 200.0));

  const std::vector<EpisodeRecord> failures{fake(Outcome::collision, 1.0, 4, 0)};
  CHECK_FALSE(compute_metrics(failures, 0.2).nav_time.has_value());
  CHECK(format_table("x", compute_metrics(failures, 0.2)).find(" - ") != std::string::npos);
  CHECK_THROWS_AS(compute_metrics(std::vector<EpisodeRecord>{}, 0.2), std::invalid_argument);
}

TEST_CASE("report json round trip") {
  const MetricsReport r = metrics_from_counts(7, 2, 1, 9.25, 3.5);
  CHECK(report_from_json(report_to_json(r)) == r);
  const MetricsReport none = metrics_from_counts(0, 3, 0, std::nullopt, 0.0);
  CHECK(report_from_json(report_to_json(none)) == none);
}

TEST_CASE("episode seeds are shared across policies") {
  CHECK(episode_seed(7, 0) == episode_seed(7, 0));
  CHECK(episode_seed(7, 0) != episode_seed(7, 1));
  CHECK(episode_seed(7, 0) != episode_seed(8, 0));

  const EpisodeConfig ep;
  ScenarioConfig sc;
  sc.n_dynamic = 3;
  sc.n_static = 2;
  const StraightPolicy straight(action_space(ep, 1.0));
  const OrcaPolicy orca(action_space(ep, 1.0), ep.orca);
  const auto a = run_evaluation(straight, 6, 11, sc, ep);
  const auto b = run_evaluation(orca, 6, 11, sc, ep);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(a.records[i].seed == b.records[i].seed);
    CHECK(a.records[i].snapshots.front().humans == b.records[i].snapshots.front().humans);
  }
}

TEST_CASE("worker count does not change results") {
  const EpisodeConfig ep;
  ScenarioConfig sc;
  sc.n_dynamic = 4;
  sc.n_static = 3;
  const OrcaPolicy orca(action_space(ep, 1.0), ep.orca);
  const auto seq = run_evaluation(orca, 12, 5, sc, ep, 1);
  const auto par = run_evaluation(orca, 12, 5, sc, ep, 4);
  CHECK(seq.report == par.report);
  for (std::size_t i = 0; i < 12; ++i) CHECK(seq.records[i].actions == par.records[i].actions);
}

TEST_CASE("straight line through an empty field") {
  const EpisodeConfig ep;
  ScenarioConfig sc;
  sc.n_dynamic = 0;
  sc.n_static = 0;
  sc.env = EnvType::none;
  const StraightPolicy straight(action_space(ep, 1.0));
  const auto res = run_evaluation(straight, 20, 3, sc, ep);
  CHECK(res.report.success_rate == 1.0);
  REQUIRE(res.report.nav_time.has_value());
  // Start and goal are each jittered by up to 0.5 m.
  CHECK(*res.report.nav_time >= 7.0 - 0.25);
  CHECK(*res.report.nav_time <= 9.0 + 0.5);
  CHECK(res.report.disc_rate == 0.0);
}
