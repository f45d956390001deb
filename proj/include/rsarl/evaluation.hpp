#ifndef RSARL_EVALUATION_HPP_
#define RSARL_EVALUATION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rsarl/episode.hpp"

namespace rsarl {

struct MetricsReport {
  double success_rate = 0.0;
  double collision_rate = 0.0;
  double timeout_rate = 0.0;
  std::optional<double> nav_time;  // s, mean over successful episodes
  double disc_rate = 0.0;          // percent of steps with 0 <= d_t < d_disc
  int n_episodes = 0;

  bool operator==(const MetricsReport&) const = default;
};

/// Throws std::invalid_argument on an empty record list.
MetricsReport compute_metrics(std::span<const EpisodeRecord> records, double d_disc);

/// Report from raw outcome counts, as used for fixtures; nav_time and
/// disc_rate are taken as given.
MetricsReport metrics_from_counts(int success, int collision, int timeout,
                                  std::optional<double> nav_time, double disc_rate);

/// Aligned text table: label, Succ., Coll., Time Out, Nav. Time, Disc. Rate.
std::string format_table(std::span<const std::pair<std::string, MetricsReport>> rows);
std::string format_table(const std::string& label, const MetricsReport& report);

nlohmann::ordered_json report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::ordered_json& j);

struct EvaluationResult {
  MetricsReport report;
  std::vector<EpisodeRecord> records;
};

/// Seed of evaluation episode `index`; every policy evaluated with the same
/// master seed faces the same scenario sequence.
std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t index);

/// Greedy evaluation over n episodes spread over `workers` threads. Results are
/// independent of the worker count.
EvaluationResult run_evaluation(const Policy& policy, int n_episodes, std::uint64_t master_seed,
                                const ScenarioConfig& scenario, const EpisodeConfig& cfg,
                                int workers = 1);

}  // namespace rsarl

#endif  // RSARL_EVALUATION_HPP_
