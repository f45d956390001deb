#include "rsarl/config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace rsarl {
namespace {

using ojson = nlohmann::ordered_json;

/// Reads optional keys of one section, remembering which were consumed so the
/// leftovers can be reported as unknown.
class Section {
 public:
  Section(const ojson& doc, std::string name, bool required) : name_(std::move(name)) {
    if (!doc.contains(name_)) {
      if (required) throw ConfigError(name_, "required section missing");
      return;
    }
    node_ = &doc.at(name_);
    if (!node_->is_object()) throw ConfigError(name_, "must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(field(key), "wrong type");
    }
  }

  void get_vec2(const char* key, Vec2& out) {
    std::vector<double> v{out.x, out.y};
    get(key, v);
    if (v.size() != 2) throw ConfigError(field(key), "expected [x, y]");
    out = {v[0], v[1]};
  }


  const ojson* child(const char* key) {
    seen_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  std::string field(const std::string& key) const { return name_ + "." + key; }

  void finish() const {
    if (node_ == nullptr) return;
    for (const auto& item : node_->items()) {
      if (!seen_.count(item.key())) throw ConfigError(field(item.key()), "unknown key");
    }
  }

 private:
  std::string name_;
  const ojson* node_ = nullptr;
  std::set<std::string> seen_;
};

std::vector<Vec2> points_from_json(const ojson& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError(field, "expected a list of [x, y]");
  std::vector<Vec2> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ConfigError(field, "expected a list of [x, y]");
    }
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

ojson points_to_json(const std::vector<Vec2>& pts) {
  ojson a = ojson::array();
  for (const Vec2& p : pts) a.push_back({p.x, p.y});
  return a;
}

std::string_view to_string(Activation a) { return a == Activation::relu ? "relu" : "elu"; }

Activation activation_from_string(const std::string& s, const std::string& field) {
  if (s == "relu") return Activation::relu;
  if (s == "elu") return Activation::elu;
  throw ConfigError(field, "unknown activation '" + s + "' (relu|elu)");
}

NetworkConfig parse_network(Section& s) {
  NetworkConfig n;
  s.get("embedding", n.embedding);
  s.get("attention", n.attention);
  s.get("head", n.head);
  s.get("grid_side", n.map.grid_side);
  s.get("cell_size", n.map.cell_size);
  std::string act(to_string(n.activation));
  s.get("activation", act);
  n.activation = activation_from_string(act, s.field("activation"));
  return n;
}

// Module validators report "section.field: message".
template <typename Fn>
void rethrow_as_config(const std::string& section, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const auto sep = what.find(": ");
    if (sep == std::string::npos) throw ConfigError(section, what);
    throw ConfigError(what.substr(0, sep), what.substr(sep + 2));
  }
}

}  // namespace

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::full: return "full";
    case Ablation::rc_only: return "rc_only";
    case Ablation::rc_rl: return "rc_rl";
    case Ablation::rc_rt: return "rc_rt";
  }
  return "full";
}

Ablation ablation_from_string(std::string_view name) {
  if (name == "full") return Ablation::full;
  if (name == "rc_only") return Ablation::rc_only;
  if (name == "rc_rl") return Ablation::rc_rl;
  if (name == "rc_rt") return Ablation::rc_rt;
  throw std::invalid_argument("unknown ablation '" + std::string(name) +
                              "' (full|rc_only|rc_rl|rc_rt)");
}

RewardTerms terms_for(Ablation a) {
  switch (a) {
    case Ablation::full: return {true, true};
    case Ablation::rc_only: return {false, false};
    case Ablation::rc_rl: return {true, false};
    case Ablation::rc_rt: return {false, true};
  }
  return {true, true};
}

EpisodeConfig RunConfig::episode() const {
  EpisodeConfig e;
  e.reward = reward;
  e.terms = terms_for(ablation);
  e.step = step;
  e.orca = orca;
  e.orca.dt = step.dt;
  e.n_headings = n_headings;
  e.dtheta_max = deg_to_rad(dtheta_max_deg);
  return e;
}

void RunConfig::validate() const {
  rethrow_as_config("train", [&] { train.validate(); });
  rethrow_as_config("scenario", [&] { scenario.validate(); });
  rethrow_as_config("network", [&] { network.validate(); });
  const auto positive = [](double v) { return v > 0.0; };
  if (!positive(reward.d_disc)) throw ConfigError("reward.d_disc", "must be > 0");
  if (reward.alpha < 0.0) throw ConfigError("reward.alpha", "must be >= 0");
  if (reward.beta < 0.0) throw ConfigError("reward.beta", "must be >= 0");
  if (!positive(reward.r_e)) throw ConfigError("reward.r_e", "must be > 0");
  if (!positive(reward.dT_st)) throw ConfigError("reward.dT_st", "must be > 0");
  if (!positive(reward.dT_dy)) throw ConfigError("reward.dT_dy", "must be > 0");
  if (!positive(reward.dT_L)) throw ConfigError("reward.dT_L", "must be > 0");
  if (!positive(reward.t_limit)) throw ConfigError("reward.t_limit", "must be > 0");
  if (!positive(reward.goal_tolerance)) throw ConfigError("reward.goal_tolerance", "must be > 0");
  if (!positive(reward.substep)) throw ConfigError("reward.substep", "must be > 0");
  if (!positive(orca.tau)) throw ConfigError("orca.tau", "must be > 0");
  if (orca.neighbor_dist < 0.0) throw ConfigError("orca.neighbor_dist", "must be >= 0");
  if (orca.max_neighbors < 0) throw ConfigError("orca.max_neighbors", "must be >= 0");
  if (orca.safety_margin < 0.0) throw ConfigError("orca.safety_margin", "must be >= 0");
  if (!positive(step.dt)) throw ConfigError("motion.dt", "must be > 0");
  if (n_headings < 1) throw ConfigError("motion.n_headings", "must be >= 1");
  if (!(dtheta_max_deg >= 0.0 && dtheta_max_deg <= 180.0)) {
    throw ConfigError("motion.dtheta_max_deg", "must be in [0, 180]");
  }
}

NetworkConfig network_from_json(const ojson& j) {
  ojson doc{{"network", j}};
  Section s(doc, "network", true);
  NetworkConfig n = parse_network(s);
  s.finish();
  return n;
}

ojson network_to_json(const NetworkConfig& n) {
  ojson j;
  j["embedding"] = n.embedding;
  j["attention"] = n.attention;
  j["head"] = n.head;
  j["grid_side"] = n.map.grid_side;
  j["cell_size"] = n.map.cell_size;
  j["activation"] = std::string(to_string(n.activation));
  return j;
}

RunConfig parse_config(const ojson& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  static const std::set<std::string> kSections{"train", "reward", "scenario", "network", "orca",
                                               "motion"};
  for (const auto& item : doc.items()) {
    if (!kSections.count(item.key())) throw ConfigError(item.key(), "unknown section");
  }

  RunConfig c;
  {
    Section s(doc, "train", true);
    TrainConfig& t = c.train;
    s.get("il_episodes", t.il_episodes);
    s.get("il_epochs", t.il_epochs);
    s.get("il_lr", t.il_lr);
    s.get("rl_episodes", t.rl_episodes);
    s.get("rl_lr", t.rl_lr);
    s.get("gamma", t.gamma);
    s.get("eps_start", t.eps_start);
    s.get("eps_end", t.eps_end);
    s.get("eps_decay_episodes", t.eps_decay_episodes);
    s.get("replay_capacity", t.replay_capacity);
    s.get("batch_size", t.batch_size);
    s.get("train_batches", t.train_batches);
    s.get("target_sync_episodes", t.target_sync_episodes);
    s.get("random_start_heading", t.random_start_heading);
    s.get("seed", t.seed);
    s.finish();
  }
  {
    Section s(doc, "reward", true);
    RewardConfig& r = c.reward;
    s.get("d_disc", r.d_disc);
    s.get("alpha", r.alpha);
    s.get("beta", r.beta);
    s.get("r_e", r.r_e);
    s.get("dT_st", r.dT_st);
    s.get("dT_dy", r.dT_dy);
    s.get("dT_L", r.dT_L);
    s.get("t_limit", r.t_limit);
    s.get("goal_tolerance", r.goal_tolerance);
    s.get("substep", r.substep);
    s.get("clamp_dynamic", r.clamp_dynamic);
    std::string ablation(to_string(c.ablation));
    s.get("ablation", ablation);
    try {
      c.ablation = ablation_from_string(ablation);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.field("ablation"), e.what());
    }
    s.finish();
  }
  {
    Section s(doc, "scenario", true);
    ScenarioConfig& sc = c.scenario;
    s.get("circle_radius", sc.circle_radius);
    s.get("n_dynamic", sc.n_dynamic);
    s.get("n_static", sc.n_static);
    std::string env(to_string(sc.env));
    s.get("env", env);
    try {
      sc.env = env_from_string(env);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(s.field("env"), e.what());
    }
    s.get_vec2("robot_start", sc.robot_start);
    s.get_vec2("robot_goal", sc.robot_goal);
    s.get("perturbation", sc.perturbation);
    s.get("agent_radius", sc.agent_radius);
    s.get("v_pref", sc.v_pref);
    s.get("seed", sc.seed);
    s.get("random_heading", sc.random_heading);
    if (const ojson* layouts = s.child("layouts")) {
      ojson wrap{{"scenario.layouts", *layouts}};
      Section l(wrap, "scenario.layouts", true);
      StaticLayouts& lay = sc.layouts;
      if (const ojson* p = l.child("separated")) lay.separated = points_from_json(*p, l.field("separated"));
      if (const ojson* p = l.child("two_barriers")) {
        lay.two_barriers = points_from_json(*p, l.field("two_barriers"));
      }
      if (const ojson* p = l.child("concave")) lay.concave = points_from_json(*p, l.field("concave"));
      l.get("separated_jitter", lay.separated_jitter);
      l.finish();
    }
    s.finish();
  }
  {
    Section s(doc, "network", true);
    c.network = parse_network(s);
    s.finish();
  }
  {
    Section s(doc, "orca", false);
    s.get("tau", c.orca.tau);
    s.get("neighbor_dist", c.orca.neighbor_dist);
    s.get("max_neighbors", c.orca.max_neighbors);
    s.get("safety_margin", c.orca.safety_margin);
    s.get("robot_visible", c.orca.robot_visible);
    s.finish();
  }
  {
    Section s(doc, "motion", false);
    s.get("dt", c.step.dt);
    s.get("n_headings", c.n_headings);
    s.get("dtheta_max_deg", c.dtheta_max_deg);
    s.finish();
  }
  c.orca.dt = c.step.dt;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  ojson doc;
  try {
    doc = ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string(), std::string("parse error: ") + e.what());
  }
  return parse_config(doc);
}

ojson to_json(const RunConfig& c) {
  ojson j;
  const TrainConfig& t = c.train;
  j["train"] = {{"il_episodes", t.il_episodes},
                {"il_epochs", t.il_epochs},
                {"il_lr", t.il_lr},
                {"rl_episodes", t.rl_episodes},
                {"rl_lr", t.rl_lr},
                {"gamma", t.gamma},
                {"eps_start", t.eps_start},
                {"eps_end", t.eps_end},
                {"eps_decay_episodes", t.eps_decay_episodes},
                {"replay_capacity", t.replay_capacity},
                {"batch_size", t.batch_size},
                {"train_batches", t.train_batches},
                {"target_sync_episodes", t.target_sync_episodes},
                {"random_start_heading", t.random_start_heading},
                {"seed", t.seed}};
  const RewardConfig& r = c.reward;
  j["reward"] = {{"d_disc", r.d_disc},
                 {"alpha", r.alpha},
                 {"beta", r.beta},
                 {"r_e", r.r_e},
                 {"dT_st", r.dT_st},
                 {"dT_dy", r.dT_dy},
                 {"dT_L", r.dT_L},
                 {"t_limit", r.t_limit},
                 {"goal_tolerance", r.goal_tolerance},
                 {"substep", r.substep},
                 {"clamp_dynamic", r.clamp_dynamic},
                 {"ablation", std::string(to_string(c.ablation))}};
  const ScenarioConfig& s = c.scenario;
  j["scenario"] = {{"circle_radius", s.circle_radius},
                   {"n_dynamic", s.n_dynamic},
                   {"n_static", s.n_static},
                   {"env", std::string(to_string(s.env))},
                   {"robot_start", {s.robot_start.x, s.robot_start.y}},
                   {"robot_goal", {s.robot_goal.x, s.robot_goal.y}},
                   {"perturbation", s.perturbation},
                   {"agent_radius", s.agent_radius},
                   {"v_pref", s.v_pref},
                   {"seed", s.seed},
                   {"random_heading", s.random_heading},
                   {"layouts",
                    {{"separated", points_to_json(s.layouts.separated)},
                     {"two_barriers", points_to_json(s.layouts.two_barriers)},
                     {"concave", points_to_json(s.layouts.concave)},
                     {"separated_jitter", s.layouts.separated_jitter}}}};
  j["network"] = network_to_json(c.network);
  j["orca"] = {{"tau", c.orca.tau},
               {"neighbor_dist", c.orca.neighbor_dist},
               {"max_neighbors", c.orca.max_neighbors},
               {"safety_margin", c.orca.safety_margin},
               {"robot_visible", c.orca.robot_visible}};
  j["motion"] = {{"dt", c.step.dt},
                 {"n_headings", c.n_headings},
                 {"dtheta_max_deg", c.dtheta_max_deg}};
  return j;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : bytes) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string config_hash(const RunConfig& cfg) { return fnv1a_hex(to_json(cfg).dump()); }

}  // namespace rsarl
