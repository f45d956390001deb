#ifndef RSARL_CONFIG_HPP_
#define RSARL_CONFIG_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rsarl/episode.hpp"
#include "rsarl/scenario.hpp"
#include "rsarl/training.hpp"
#include "rsarl/valuenet.hpp"

namespace rsarl {

/// Reward ablations: the full reward, R_c only, R_c + R_l, R_c + R_t.
enum class Ablation { full, rc_only, rc_rl, rc_rt };

std::string_view to_string(Ablation a);
Ablation ablation_from_string(std::string_view name);
RewardTerms terms_for(Ablation a);

/// The whole run configuration, one JSON document. Sections "train",
/// "reward", "scenario" and "network" are required; keys inside every section
/// are optional and default to the values below. Unknown keys are rejected.
///
///   train:    il_episodes, il_epochs, il_lr, rl_episodes, rl_lr, gamma,
///             eps_start, eps_end, eps_decay_episodes, replay_capacity,
///             batch_size, train_batches, target_sync_episodes,
///             random_start_heading, seed
///   reward:   d_disc, alpha, beta, r_e, dT_st, dT_dy, dT_L, t_limit,
///             goal_tolerance, substep, clamp_dynamic, ablation
///   scenario: circle_radius, n_dynamic, n_static, env, robot_start,
///             robot_goal, perturbation, agent_radius, v_pref, seed,
///             random_heading, layouts
///             {separated, two_barriers, concave, separated_jitter}
///   network:  embedding, attention, head, grid_side, cell_size, activation
///   orca:     tau, neighbor_dist, max_neighbors, safety_margin, robot_visible
///   motion:   dt, n_headings, dtheta_max_deg
struct RunConfig {
  TrainConfig train;
  RewardConfig reward;
  Ablation ablation = Ablation::full;
  ScenarioConfig scenario;
  NetworkConfig network;
  OrcaConfig orca;
  StepConfig step;
  int n_headings = 10;
  double dtheta_max_deg = 10.0;

  EpisodeConfig episode() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

RunConfig parse_config(const nlohmann::ordered_json& doc);
/// Throws ConfigError (also for unreadable or unparsable files).
RunConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const RunConfig& cfg);
nlohmann::ordered_json network_to_json(const NetworkConfig& cfg);
NetworkConfig network_from_json(const nlohmann::ordered_json& j);

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace rsarl

#endif  // RSARL_CONFIG_HPP_
