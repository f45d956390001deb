#include "rsarl/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <ctime>
#include <fstream>
#include <optional>
#include <thread>

#include "rsarl/checkpoint.hpp"
#include "rsarl/evaluation.hpp"
#include "rsarl/export_schema.hpp"

namespace rsarl {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr std::uint64_t kInitStream = 0x696e6974ULL;
constexpr std::uint64_t kShuffleStream = 0x73687566ULL;
constexpr std::uint64_t kDemoScenarioStream = 0x64736365ULL;
constexpr std::uint64_t kRlScenarioStream = 0x72736365ULL;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ArgumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::optional<std::string> env;
  std::optional<std::string> ablation;
  std::string policy = "net";
  std::string out;
  int workers = 0;
  std::string checkpoint;
  std::string records;
  long long index = 0;
  bool quiet = false;
};

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("write failed: " + path.string());
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_text(tmp, text);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

fs::path prepare_out_dir(const std::string& out) {
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + out);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    std::uint64_t seed, const std::vector<std::string>& outputs) {
  ojson m;
  m["artifact"] = "rsarl";
  m["artifact_version"] = kArtifactVersion;
  m["command"] = command;
  m["config_hash"] = config_hash(cfg);
  m["master_seed"] = seed;
  m["created_utc"] = utc_now();
  m["outputs"] = outputs;
  m["config"] = to_json(cfg);
  write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

RunConfig load_with_overrides(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (o.env) {
    try {
      cfg.scenario.env = env_from_string(*o.env);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("--env", e.what());
    }
  }
  if (o.ablation) {
    try {
      cfg.ablation = ablation_from_string(*o.ablation);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("--ablation", e.what());
    }
  }
  cfg.validate();
  return cfg;
}

TrajectoryMeta meta_for(const RunConfig& cfg) {
  return {config_hash(cfg), cfg.step.dt, cfg.reward.d_disc, cfg.reward.t_limit};
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig cfg = load_with_overrides(o);
  if (o.seed) cfg.train.seed = *o.seed;
  if (o.episodes) cfg.train.rl_episodes = *o.episodes;
  cfg.validate();

  const fs::path dir = prepare_out_dir(o.out);
  write_manifest(dir, "train", cfg, cfg.train.seed,
                 {"config.json", "il_log.jsonl", "il_model.ckpt", "train_log.jsonl", "model.ckpt"});
  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");

  const fs::path il_log = dir / "il_log.jsonl";
  const fs::path rl_log = dir / "train_log.jsonl";
  ImitationResult il;
  try {
    il = imitation_stage(cfg);
  } catch (const DivergenceError& e) {
    err << "error: imitation learning diverged: " << e.what() << "\n";
    return kExitDivergence;
  }
  {
    std::string text;
    for (std::size_t i = 0; i < il.epoch_losses.size(); ++i) {
      ojson line{{"epoch", i}, {"loss", il.epoch_losses[i]}};
      text += line.dump() + "\n";
    }
    write_text(il_log, text);
  }
  save_checkpoint(il.params, dir / "il_model.ckpt");

  std::ofstream log(rl_log, std::ios::binary | std::ios::trunc);
  if (!log) throw IoError("cannot write " + rl_log.string());
  RlResult rl;
  try {
    rl = rl_stage(cfg, il.params, [&](const EpisodeLogEntry& e) {
      log << format_log_line(e) << '\n';
      log.flush();
      if (!o.quiet && (e.episode + 1) % 100 == 0) {
        err << "rl episode " << e.episode + 1 << "/" << cfg.train.rl_episodes << "\n";
      }
    });
  } catch (const DivergenceError& e) {
    err << "error: training diverged: " << e.what() << " (see " << rl_log.string() << ")\n";
    return kExitDivergence;
  }
  log.close();
  if (!log) throw IoError("write failed: " + rl_log.string());
  save_checkpoint(rl.params, dir / "model.ckpt");

  int successes = 0;
  for (const auto& e : rl.log) successes += e.outcome == Outcome::success;
  out << "trained " << rl.log.size() << " RL episodes after " << il.demonstration_states
      << " demonstration states; training success " << successes << "/" << rl.log.size()
      << "; wrote " << (dir / "model.ckpt").string() << "\n";
  return kExitOk;
}

std::string label_for(const std::string& policy, const RunConfig& cfg) {
  if (policy != "net") return policy;
  return "net(" + std::string(to_string(cfg.ablation)) + ")";
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& /*err*/) {
  const RunConfig cfg = load_with_overrides(o);
  const std::uint64_t seed = o.seed.value_or(cfg.scenario.seed);
  const int n = o.episodes.value_or(500);
  if (n < 1) throw ArgumentError("--episodes must be >= 1");
  const int workers =
      o.workers > 0 ? o.workers : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));

  std::optional<ValueNetParams> params;
  if (o.policy == "net") {
    if (o.checkpoint.empty()) throw ArgumentError("--policy net requires --checkpoint");
    params = load_checkpoint(o.checkpoint, cfg.network);
  }
  const auto policy = make_policy(o.policy, cfg, params ? &*params : nullptr);

  const fs::path dir = prepare_out_dir(o.out);
  write_manifest(dir, "eval", cfg, seed, {"report.txt", "report.json", "episodes.jsonl"});

  const EvaluationResult result =
      run_evaluation(*policy, n, seed, cfg.scenario, cfg.episode(), workers);
  const std::string table = format_table(label_for(o.policy, cfg), result.report);
  write_text(dir / "report.txt", table);
  ojson report = report_to_json(result.report);
  report["policy"] = o.policy;
  report["env"] = std::string(to_string(cfg.scenario.env));
  report["ablation"] = std::string(to_string(cfg.ablation));
  report["master_seed"] = seed;
  report["config_hash"] = config_hash(cfg);
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_records_file(dir / "episodes.jsonl", result.records, meta_for(cfg));
  out << table;
  return kExitOk;
}

int cmd_demo(const Options& o, std::ostream& out, std::ostream& /*err*/) {
  RunConfig cfg = load_with_overrides(o);
  if (o.seed) cfg.train.seed = *o.seed;
  if (o.episodes) cfg.train.il_episodes = *o.episodes;
  cfg.validate();
  if (cfg.train.il_episodes < 1) throw ArgumentError("demo needs at least one episode");

  const fs::path dir = prepare_out_dir(o.out);
  write_manifest(dir, "demo", cfg, cfg.train.seed, {"demos.jsonl", "report.txt", "report.json"});

  const EpisodeConfig ep = cfg.episode();
  const DemonstrationSet demos = collect_demonstrations(
      cfg.train.il_episodes,
      seeded_scenarios(cfg.scenario, cfg.train.seed, kDemoScenarioStream), ep, cfg.network.map,
      {cfg.train.gamma, cfg.scenario.v_pref, cfg.step.dt}, cfg.train.seed);
  write_records_file(dir / "demos.jsonl", demos.episodes, meta_for(cfg));
  const MetricsReport report = compute_metrics(demos.episodes, cfg.reward.d_disc);
  const std::string table = format_table("orca-demo", report);
  write_text(dir / "report.txt", table);
  ojson j = report_to_json(report);
  j["demonstration_states"] = demos.experiences.size();
  write_text(dir / "report.json", j.dump(2) + "\n");
  out << table;
  return kExitOk;
}

int cmd_export(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<ojson> docs;
  try {
    docs = read_records_file(o.records);
  } catch (const SchemaError& e) {
    throw ArgumentError(e.what());
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  if (o.index < 0 || static_cast<std::size_t>(o.index) >= docs.size()) {
    throw ArgumentError("episode index " + std::to_string(o.index) + " out of range [0, " +
                        std::to_string(docs.size()) + ")");
  }
  const ojson& doc = docs[static_cast<std::size_t>(o.index)];
  const auto problems = validate(doc);
  if (!problems.empty()) {
    for (const auto& p : problems) err << "invalid record: " << p << "\n";
    return kExitInvalidArgument;
  }
  write_text(o.out, dump_line(doc) + "\n");
  out << "wrote episode " << o.index << " (" << doc["steps"].size() << " steps) to " << o.out
      << "\n";
  return kExitOk;
}

ScenarioConfig training_scenarios(const RunConfig& cfg) {
  ScenarioConfig sc = cfg.scenario;
  if (cfg.train.random_start_heading) sc.random_heading = true;
  return sc;
}

}  // namespace

ImitationResult imitation_stage(const RunConfig& cfg) {
  const std::uint64_t seed = cfg.train.seed;
  Rng init_rng(derive_seed(seed, kInitStream));
  ImitationResult result;
  result.params = ValueNetParams::initialize(cfg.network, init_rng);
  if (cfg.train.il_episodes == 0) return result;

  const DemonstrationSet demos = collect_demonstrations(
      cfg.train.il_episodes, seeded_scenarios(training_scenarios(cfg), seed, kDemoScenarioStream),
      cfg.episode(), cfg.network.map, {cfg.train.gamma, cfg.scenario.v_pref, cfg.step.dt}, seed);
  result.demonstration_states = static_cast<int>(demos.experiences.size());
  Rng shuffle_rng(derive_seed(seed, kShuffleStream));
  result.params =
      imitation_fit(result.params, demos.experiences, cfg.train, shuffle_rng, &result.epoch_losses);
  return result;
}

RlResult rl_stage(const RunConfig& cfg, ValueNetParams params,
                  const std::function<void(const EpisodeLogEntry&)>& on_episode) {
  return rl_train(std::move(params), cfg.train,
                  seeded_scenarios(training_scenarios(cfg), cfg.train.seed, kRlScenarioStream),
                  cfg.episode(),
                  on_episode);
}

TrainArtifacts train_pipeline(const RunConfig& cfg,
                              const std::function<void(const EpisodeLogEntry&)>& on_episode) {
  TrainArtifacts a;
  a.imitation = imitation_stage(cfg);
  a.rl = rl_stage(cfg, a.imitation.params, on_episode);
  return a;
}

std::unique_ptr<Policy> make_policy(const std::string& kind, const RunConfig& cfg,
                                    const ValueNetParams* params) {
  const EpisodeConfig ep = cfg.episode();
  const double v_pref = cfg.scenario.v_pref;
  if (kind == "orca") return std::make_unique<OrcaPolicy>(action_space(ep, v_pref), ep.orca);
  if (kind == "straight") return std::make_unique<StraightPolicy>(action_space(ep, v_pref));
  if (kind == "net") {
    if (params == nullptr) throw std::invalid_argument("policy 'net' needs network parameters");
    return std::make_unique<ValueNetworkPolicy>(
        make_lookahead(*params, ep, cfg.train.gamma, v_pref), action_space(ep, v_pref), 0.0);
  }
  throw std::invalid_argument("unknown policy '" + kind + "' (net|orca|straight)");
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Crowd navigation with look-ahead rewards: training, evaluation, export"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::string> envs{"separated", "two_barriers", "concave", "none"};
  const std::vector<std::string> ablations{"full", "rc_only", "rc_rl", "rc_rt"};
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run configuration (JSON)")->required();
    sub->add_option("--seed", o.seed, "Master seed (overrides the config)");
    sub->add_option("--env", o.env, "Static layout")->check(CLI::IsMember(envs));
    sub->add_option("--ablation", o.ablation, "Reward terms")->check(CLI::IsMember(ablations));
    sub->add_option("--out", o.out, "Output directory")->required();
    sub->add_flag("--quiet", o.quiet, "No progress output");
  };

  CLI::App* train = app.add_subcommand("train", "Imitation then RL training");
  add_common(train);
  train->add_option("--episodes", o.episodes, "RL episodes (overrides the config)");

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a policy");
  add_common(eval);
  eval->add_option("--episodes", o.episodes, "Evaluation episodes (default 500)");
  eval->add_option("--policy", o.policy, "Policy")
      ->check(CLI::IsMember({"net", "orca", "straight"}));
  eval->add_option("--checkpoint", o.checkpoint, "Model checkpoint for --policy net");
  eval->add_option("--workers", o.workers, "Worker threads (default: all cores)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* demo = app.add_subcommand("demo", "Collect ORCA demonstrations only");
  add_common(demo);
  demo->add_option("--episodes", o.episodes, "Demonstration episodes (overrides the config)");

  CLI::App* exp = app.add_subcommand("export", "Extract one episode from a records file");
  exp->add_option("--records", o.records, "Episode records file")->required();
  exp->add_option("--index", o.index, "Episode index")->required();
  exp->add_option("--out", o.out, "Output trajectory file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return cmd_train(o, out, err);
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (demo->parsed()) return cmd_demo(o, out, err);
    return cmd_export(o, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << "\n";
    return e.kind() == CheckpointError::Kind::io ? kExitIo : kExitCheckpoint;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidArgument;
  } catch (const ScenarioError& e) {
    err << "scenario error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DivergenceError& e) {
    err << "error: diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::runtime_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidArgument;
  }
}

}  // namespace rsarl
