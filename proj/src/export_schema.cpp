#include "rsarl/export_schema.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>

namespace rsarl {
namespace {

using ojson = nlohmann::ordered_json;

ojson reward_to_json(const RewardBreakdown& r) {
  ojson j;
  j["r_c"] = round9(r.r_c);
  j["r_st"] = round9(r.r_st);
  j["r_dy"] = round9(r.r_dy);
  j["r_t"] = round9(r.r_t);
  j["total"] = round9(r.total);
  j["n_col"] = r.n_col;
  j["n_static"] = r.n_static;
  j["d_lookahead_dyn"] = r.d_lookahead_dyn ? ojson(round9(*r.d_lookahead_dyn)) : ojson();
  return j;
}

RewardBreakdown reward_from_json(const nlohmann::ordered_json& j) {
  RewardBreakdown r;
  r.r_c = j.at("r_c").get<double>();
  r.r_st = j.at("r_st").get<double>();
  r.r_dy = j.at("r_dy").get<double>();
  r.r_t = j.at("r_t").get<double>();
  r.total = j.at("total").get<double>();
  r.n_col = j.at("n_col").get<int>();
  r.n_static = j.at("n_static").get<int>();
  if (!j.at("d_lookahead_dyn").is_null()) r.d_lookahead_dyn = j.at("d_lookahead_dyn").get<double>();
  return r;
}

int major_of(const std::string& version) {
  const auto dot = version.find('.');
  const std::string head = version.substr(0, dot);
  if (head.empty() || head.find_first_not_of("0123456789") != std::string::npos) return -1;
  return std::atoi(head.c_str());
}

bool is_number_array(const nlohmann::ordered_json& j, std::size_t n) {
  if (!j.is_array() || j.size() != n) return false;
  for (const auto& v : j) {
    if (!v.is_number()) return false;
  }
  return true;
}

}  // namespace

double round9(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

ojson to_trajectory(const EpisodeRecord& rec, const TrajectoryMeta& meta) {
  std::vector<bool> is_static(rec.snapshots.empty() ? 0 : rec.snapshots.front().humans.size());
  for (const std::size_t id : rec.static_ids) {
    if (id < is_static.size()) is_static[id] = true;
  }

  ojson doc;
  doc["schema"] = kTrajectorySchema;
  doc["version"] = kTrajectoryVersion;

  ojson header;
  header["configs_hash"] = meta.configs_hash;
  header["seed"] = rec.seed;
  header["env_type"] = std::string(to_string(rec.env));
  header["dt"] = round9(meta.dt);
  header["d_disc"] = round9(meta.d_disc);
  header["t_limit"] = round9(meta.t_limit);
  if (!rec.snapshots.empty()) {
    const auto& first = rec.snapshots.front();
    header["robot_radius"] = round9(first.robot.radius);
    header["robot_goal"] = {round9(first.robot.gx), round9(first.robot.gy)};
    ojson radii = ojson::array();
    for (const auto& h : first.humans) radii.push_back(round9(h.radius));
    header["human_radii"] = radii;
  }
  header["static_ids"] = rec.static_ids;
  doc["header"] = header;

  ojson steps = ojson::array();
  for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
    const Snapshot& s = rec.snapshots[k];
    ojson step;
    step["t"] = round9(s.t);
    step["robot"] = {round9(s.robot.px), round9(s.robot.py), round9(s.robot.theta),
                     round9(s.robot.vx), round9(s.robot.vy)};
    ojson humans = ojson::array();
    for (std::size_t i = 0; i < s.humans.size(); ++i) {
      const auto& h = s.humans[i];
      humans.push_back({round9(h.px), round9(h.py), round9(h.vx), round9(h.vy),
                        is_static[i] ? 1 : 0});
    }
    step["humans"] = humans;
    if (k == 0) {
      step["action"] = nullptr;
      step["reward"] = nullptr;
      step["d_min"] = nullptr;
    } else {
      const Action& a = rec.actions[k - 1];
      step["action"] = {round9(a.v), round9(a.dtheta)};
      step["reward"] = reward_to_json(rec.rewards[k - 1]);
      const double d = rec.clearances[k - 1];
      step["d_min"] = std::isfinite(d) ? ojson(round9(d)) : ojson();
    }
    steps.push_back(step);
  }
  doc["steps"] = steps;

  ojson footer;
  footer["outcome"] = std::string(to_string(rec.outcome));
  footer["nav_time"] = round9(rec.nav_time);
  footer["discomfort_steps"] = rec.discomfort_steps;
  doc["footer"] = footer;
  return doc;
}

std::vector<std::string> validate(const nlohmann::ordered_json& doc) {
  std::vector<std::string> v;
  if (!doc.is_object()) return {"document: not an object"};
  if (!doc.contains("schema") || doc["schema"] != kTrajectorySchema) v.push_back("schema: missing or unknown");
  if (!doc.contains("version") || !doc["version"].is_string()) {
    v.push_back("version: missing");
  } else if (major_of(doc["version"].get<std::string>()) != kTrajectoryMajor) {
    v.push_back("version: unsupported major '" + doc["version"].get<std::string>() + "'");
  }

  const bool has_header = doc.contains("header") && doc["header"].is_object();
  if (!has_header) v.push_back("header: missing");
  double dt = 0.0;
  if (has_header) {
    const auto& h = doc["header"];
    for (const char* key : {"configs_hash", "seed", "env_type", "dt", "d_disc", "t_limit",
                            "static_ids"}) {
      if (!h.contains(key)) v.push_back(std::string("header.") + key + ": missing");
    }
    if (h.contains("dt") && h["dt"].is_number()) dt = h["dt"].get<double>();
  }

  if (!doc.contains("steps") || !doc["steps"].is_array() || doc["steps"].empty()) {
    v.push_back("steps: missing or empty");
  } else {
    const auto& steps = doc["steps"];
    std::size_t n_humans = 0;
    double prev_t = 0.0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto& s = steps[k];
      const std::string at = "step " + std::to_string(k) + ": ";
      if (!s.contains("t") || !s["t"].is_number()) {
        v.push_back(at + "t missing");
      } else {
        const double t = s["t"].get<double>();
        if (k > 0) {
          if (!(t > prev_t)) {
            v.push_back(at + "t not increasing");
          } else if (dt > 0.0 && std::fabs((t - prev_t) - dt) > 1e-6) {
            v.push_back(at + "t step differs from dt");
          }
        }
        prev_t = t;
      }
      if (!s.contains("robot") || !is_number_array(s["robot"], 5)) v.push_back(at + "robot malformed");
      if (!s.contains("humans") || !s["humans"].is_array()) {
        v.push_back(at + "humans missing");
      } else {
        if (k == 0) n_humans = s["humans"].size();
        if (s["humans"].size() != n_humans) v.push_back(at + "humans count changed");
        for (const auto& h : s["humans"]) {
          if (!is_number_array(h, 5)) {
            v.push_back(at + "humans entry malformed");
            break;
          }
        }
      }
      const bool first = k == 0;
      if (!s.contains("action") || (first ? !s["action"].is_null() : !is_number_array(s["action"], 2))) {
        v.push_back(at + "action malformed");
      }
      if (!s.contains("reward") || (first ? !s["reward"].is_null() : !s["reward"].is_object())) {
        v.push_back(at + "reward malformed");
      }
    }
  }

  if (!doc.contains("footer") || !doc["footer"].is_object()) {
    v.push_back("footer: missing");
  } else {
    const auto& f = doc["footer"];
    try {
      outcome_from_string(f.at("outcome").get<std::string>());
    } catch (const std::exception&) {
      v.push_back("footer.outcome: missing or unknown");
    }
    if (!f.contains("nav_time") || !f["nav_time"].is_number()) v.push_back("footer.nav_time: missing");
  }
  return v;
}

EpisodeRecord from_trajectory(const nlohmann::ordered_json& doc) {
  const auto problems = validate(doc);
  if (!problems.empty()) throw SchemaError("invalid trajectory document: " + problems.front());
  try {
    EpisodeRecord rec;
    const auto& header = doc.at("header");
    rec.seed = header.at("seed").get<std::uint64_t>();
    rec.env = env_from_string(header.at("env_type").get<std::string>());
    rec.static_ids = header.at("static_ids").get<std::vector<std::size_t>>();
    const double robot_radius = header.value("robot_radius", 0.3);
    Vec2 goal;
    if (header.contains("robot_goal")) {
      goal = {header["robot_goal"][0].get<double>(), header["robot_goal"][1].get<double>()};
    }
    const auto radii = header.value("human_radii", std::vector<double>{});

    const auto& steps = doc.at("steps");
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const auto& s = steps[k];
      Snapshot snap;
      snap.t = s.at("t").get<double>();
      const auto& r = s.at("robot");
      snap.robot.px = r[0].get<double>();
      snap.robot.py = r[1].get<double>();
      snap.robot.theta = r[2].get<double>();
      snap.robot.vx = r[3].get<double>();
      snap.robot.vy = r[4].get<double>();
      snap.robot.radius = robot_radius;
      snap.robot.gx = goal.x;
      snap.robot.gy = goal.y;
      const auto& hs = s.at("humans");
      for (std::size_t i = 0; i < hs.size(); ++i) {
        FullAgentState h;
        h.px = hs[i][0].get<double>();
        h.py = hs[i][1].get<double>();
        h.vx = hs[i][2].get<double>();
        h.vy = hs[i][3].get<double>();
        h.radius = i < radii.size() ? radii[i] : 0.3;
        h.v_pref = 0.0;
        snap.humans.push_back(h);
      }
      rec.snapshots.push_back(std::move(snap));
      if (k > 0) {
        rec.actions.push_back({s["action"][0].get<double>(), s["action"][1].get<double>()});
        rec.rewards.push_back(reward_from_json(s.at("reward")));
        rec.clearances.push_back(s.at("d_min").is_null()
                                     ? std::numeric_limits<double>::infinity()
                                     : s["d_min"].get<double>());
      }
    }
    const auto& footer = doc.at("footer");
    rec.outcome = outcome_from_string(footer.at("outcome").get<std::string>());
    rec.nav_time = footer.at("nav_time").get<double>();
    rec.discomfort_steps = footer.value("discomfort_steps", 0);
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("invalid trajectory document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("invalid trajectory document: ") + e.what());
  }
}

std::string dump_line(const ojson& doc) { return doc.dump(); }

void write_records_file(const std::filesystem::path& path, std::span<const EpisodeRecord> records,
                        const TrajectoryMeta& meta) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const EpisodeRecord& rec : records) out << dump_line(to_trajectory(rec, meta)) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ojson> read_records_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<ojson> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      docs.push_back(ojson::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return docs;
}

}  // namespace rsarl
