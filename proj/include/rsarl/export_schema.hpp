#ifndef RSARL_EXPORT_SCHEMA_HPP_
#define RSARL_EXPORT_SCHEMA_HPP_

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsarl/episode.hpp"

namespace rsarl {

/// Trajectory documents are JSON objects, one per line:
///
///   {"schema": "rsarl-trajectory", "version": "1.0",
///    "header": {configs_hash, seed, env_type, dt, d_disc, t_limit,
///               robot_radius, robot_goal, human_radii, static_ids},
///    "steps": [{t, robot: [x, y, theta, vx, vy],
///               humans: [[x, y, vx, vy, static_flag], ...],
///               action: [v, dtheta] | null, reward: {...} | null, d_min: m | null}],
///    "footer": {outcome, nav_time, discomfort_steps}}
///
/// Step 0 is the initial state and carries null action, reward and d_min; step
/// k > 0 carries the action and reward of the transition that produced it.
/// Reals are written with 9 significant digits.
inline constexpr const char* kTrajectorySchema = "rsarl-trajectory";
inline constexpr const char* kTrajectoryVersion = "1.0";
inline constexpr int kTrajectoryMajor = 1;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Run-level values copied into every header.
struct TrajectoryMeta {
  std::string configs_hash;
  double dt = 0.25;
  double d_disc = 0.2;
  double t_limit = 25.0;
};

/// Rounds to 9 significant decimal digits.
double round9(double v);

nlohmann::ordered_json to_trajectory(const EpisodeRecord& record, const TrajectoryMeta& meta);

/// Rebuilds an episode record (human goals and preferences are not part of the
/// format and come back as zero). Throws SchemaError on malformed input or an
/// unsupported major version.
EpisodeRecord from_trajectory(const nlohmann::ordered_json& doc);

/// Empty iff the document satisfies every format invariant; each entry names
/// the offending step index and field.
std::vector<std::string> validate(const nlohmann::ordered_json& doc);

/// One document per line, in record order.
void write_records_file(const std::filesystem::path& path, std::span<const EpisodeRecord> records,
                        const TrajectoryMeta& meta);

/// Reads every line of a records file. Throws SchemaError on a parse error and
/// std::runtime_error when the file cannot be opened.
std::vector<nlohmann::ordered_json> read_records_file(const std::filesystem::path& path);

/// Serialized single-line form, as written to files (newline not included).
std::string dump_line(const nlohmann::ordered_json& doc);

}  // namespace rsarl

#endif  // RSARL_EXPORT_SCHEMA_HPP_
