#include "rsarl/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace rsarl {
namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

MetricsReport metrics_from_counts(int success, int collision, int timeout,
                                  std::optional<double> nav_time, double disc_rate) {
  const int n = success + collision + timeout;
  if (n <= 0) throw std::invalid_argument("metrics: no episodes");
  MetricsReport r;
  r.n_episodes = n;
  r.success_rate = static_cast<double>(success) / n;
  r.collision_rate = static_cast<double>(collision) / n;
  r.timeout_rate = static_cast<double>(timeout) / n;
  r.nav_time = nav_time;
  r.disc_rate = disc_rate;
  return r;
}

MetricsReport compute_metrics(std::span<const EpisodeRecord> records, double d_disc) {
  if (records.empty()) throw std::invalid_argument("compute_metrics: no episode records");
  int success = 0, collision = 0, timeout = 0;
  double nav_sum = 0.0;
  long disc_steps = 0, total_steps = 0;
  for (const EpisodeRecord& rec : records) {
    switch (rec.outcome) {
      case Outcome::success:
        ++success;
        nav_sum += rec.nav_time;
        break;
      case Outcome::collision: ++collision; break;
      case Outcome::timeout: ++timeout; break;
    }
    for (const double d : rec.clearances) {
      if (is_discomfort(d, d_disc)) ++disc_steps;
    }
    total_steps += static_cast<long>(rec.clearances.size());
  }
  const std::optional<double> nav =
      success > 0 ? std::optional<double>(nav_sum / success) : std::nullopt;
  const double disc =
      total_steps > 0 ? 100.0 * static_cast<double>(disc_steps) / total_steps : 0.0;
  return metrics_from_counts(success, collision, timeout, nav, disc);
}

std::string format_table(std::span<const std::pair<std::string, MetricsReport>> rows) {
  std::size_t label_width = 6;
  for (const auto& [label, _] : rows) label_width = std::max(label_width, label.size());
  label_width += 2;
  const std::size_t col = 11;

  std::string out = pad("Method", label_width);
  for (const char* h : {"Succ.", "Coll.", "Time Out", "Nav. Time", "Disc. Rate"}) {
    out += pad(h, col);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  out += '\n';
  for (const auto& [label, r] : rows) {
    std::string line = pad(label, label_width);
    line += pad(fixed2(r.success_rate), col);
    line += pad(fixed2(r.collision_rate), col);
    line += pad(fixed2(r.timeout_rate), col);
    line += pad(r.nav_time ? fixed2(*r.nav_time) : "-", col);
    line += fixed2(r.disc_rate);
    out += line + '\n';
  }
  return out;
}

std::string format_table(const std::string& label, const MetricsReport& report) {
  const std::pair<std::string, MetricsReport> row{label, report};
  return format_table(std::span(&row, 1));
}

nlohmann::ordered_json report_to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["n_episodes"] = r.n_episodes;
  j["success_rate"] = r.success_rate;
  j["collision_rate"] = r.collision_rate;
  j["timeout_rate"] = r.timeout_rate;
  j["nav_time"] = r.nav_time ? nlohmann::ordered_json(*r.nav_time) : nlohmann::ordered_json();
  j["disc_rate"] = r.disc_rate;
  return j;
}

MetricsReport report_from_json(const nlohmann::ordered_json& j) {
  MetricsReport r;
  r.n_episodes = j.at("n_episodes").get<int>();
  r.success_rate = j.at("success_rate").get<double>();
  r.collision_rate = j.at("collision_rate").get<double>();
  r.timeout_rate = j.at("timeout_rate").get<double>();
  if (!j.at("nav_time").is_null()) r.nav_time = j.at("nav_time").get<double>();
  r.disc_rate = j.at("disc_rate").get<double>();
  return r;
}

std::uint64_t episode_seed(std::uint64_t master_seed, std::uint64_t index) {
  return derive_seed(master_seed, index);
}

EvaluationResult run_evaluation(const Policy& policy, int n_episodes, std::uint64_t master_seed,
                                const ScenarioConfig& scenario, const EpisodeConfig& cfg,
                                int workers) {
  if (n_episodes < 1) throw std::invalid_argument("run_evaluation: n_episodes must be >= 1");
  EvaluationResult result;
  result.records.resize(static_cast<std::size_t>(n_episodes));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < n_episodes; i = next++) {
      try {
        const std::uint64_t seed = episode_seed(master_seed, static_cast<std::uint64_t>(i));
        const Scenario sc = generate_scenario(scenario, seed);
        Rng rng(derive_seed(seed, 1));
        result.records[static_cast<std::size_t>(i)] = run_episode(policy, sc, cfg, rng);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const int n_threads = std::clamp(workers, 1, n_episodes);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.report = compute_metrics(result.records, cfg.reward.d_disc);
  return result;
}

}  // namespace rsarl
