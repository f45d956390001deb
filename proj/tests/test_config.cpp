#include <doctest.h>

#include <stdexcept>

#include <cstdlib>
#include <filesystem>

#include "rsarl/config.hpp"

using namespace rsarl;

namespace {

std::filesystem::path config_dir() {
  const char* d = std::getenv("RSARL_CONFIG_DIR");
  return d ? std::filesystem::path(d) : std::filesystem::path(RSARL_SOURCE_CONFIGS);
}

nlohmann::ordered_json minimal() {
  return nlohmann::ordered_json::parse(
      R"({"train": {}, "reward": {}, "scenario": {}, "network": {}})");
}

std::string field_of(const nlohmann::ordered_json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("shipped configs parse") {
  for (const char* name : {"default.json", "tiny.json"}) {
    CAPTURE(name);
    const RunConfig cfg = load_config(config_dir() / name);
    CHECK(cfg.step.dt == 0.25);
  }
  const RunConfig def = load_config(config_dir() / "default.json");
  CHECK(def.train.il_episodes == 3000);
  CHECK(def.train.rl_episodes == 10000);
  CHECK(def.train.gamma == 0.9);
  CHECK(def.reward.alpha == 0.15);
  CHECK(def.reward.beta == 0.5);
  CHECK(def.reward.r_e == 1.0);
  CHECK(def.scenario.n_dynamic == 10);
  CHECK(def.scenario.n_static == 5);
  CHECK(def.network.map.grid_side == 4);
}

TEST_CASE("empty sections take defaults") {
  const RunConfig cfg = parse_config(minimal());
  CHECK(cfg.train == TrainConfig{});
  CHECK(cfg.scenario == ScenarioConfig{});
  CHECK(cfg.ablation == Ablation::full);
  const EpisodeConfig ep = cfg.episode();
  CHECK(ep.orca.dt == cfg.step.dt);
  CHECK(ep.dtheta_max == doctest::Approx(deg_to_rad(10.0)));
}

TEST_CASE("errors name the field") {
  auto doc = minimal();
  doc.erase("network");
  CHECK(field_of(doc) == "network");

  doc = minimal();
  doc["train"]["learning_rate"] = 0.1;
  CHECK(field_of(doc) == "train.learning_rate");

  doc = minimal();
  doc["train"]["gamma"] = "high";
  CHECK(field_of(doc) == "train.gamma");

  doc = minimal();
  doc["train"]["gamma"] = 1.5;
  CHECK(field_of(doc) == "train.gamma");

  doc = minimal();
  doc["scenario"]["env"] = "maze";
  CHECK(field_of(doc) == "scenario.env");

  doc = minimal();
  doc["reward"]["ablation"] = "none";
  CHECK(field_of(doc) == "reward.ablation");

  doc = minimal();
  doc["extras"] = {};
  CHECK(field_of(doc) == "extras");

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("ablations select reward terms") {
  CHECK(terms_for(Ablation::full).lookahead);
  CHECK(terms_for(Ablation::full).time);
  CHECK_FALSE(terms_for(Ablation::rc_only).lookahead);
  CHECK_FALSE(terms_for(Ablation::rc_only).time);
  CHECK(terms_for(Ablation::rc_rl).lookahead);
  CHECK_FALSE(terms_for(Ablation::rc_rl).time);
  CHECK_FALSE(terms_for(Ablation::rc_rt).lookahead);
  CHECK(terms_for(Ablation::rc_rt).time);
  for (const Ablation a : {Ablation::full, Ablation::rc_only, Ablation::rc_rl, Ablation::rc_rt}) {
    CHECK(ablation_from_string(to_string(a)) == a);
  }
  auto doc = minimal();
  doc["reward"]["ablation"] = "rc_rl";
  CHECK(parse_config(doc).episode().terms.lookahead);
  CHECK_FALSE(parse_config(doc).episode().terms.time);
}

TEST_CASE("canonical form and hash") {
  const RunConfig cfg = load_config(config_dir() / "tiny.json");
  const RunConfig again = parse_config(to_json(cfg));
  CHECK(to_json(again) == to_json(cfg));
  CHECK(config_hash(again) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);
  RunConfig other = cfg;
  other.train.seed += 1;
  CHECK(config_hash(other) != config_hash(cfg));
  other = cfg;
  other.train.random_start_heading = true;
  other.scenario.random_heading = true;
  const RunConfig flags = parse_config(to_json(other));
  CHECK(flags.train.random_start_heading);
  CHECK(flags.scenario.random_heading);
  CHECK(config_hash(flags) != config_hash(cfg));
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
