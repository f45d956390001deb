#ifndef RSARL_TRAINING_HPP_
#define RSARL_TRAINING_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsarl/episode.hpp"
#include "rsarl/valuenet.hpp"

namespace rsarl {

struct TrainConfig {
  int il_episodes = 3000;
  int il_epochs = 50;
  double il_lr = 0.01;
  int rl_episodes = 10000;
  double rl_lr = 1e-4;
  double gamma = 0.9;
  double eps_start = 0.5;
  double eps_end = 0.1;
  int eps_decay_episodes = 4000;
  int replay_capacity = 100000;
  int batch_size = 100;
  /// Gradient steps taken after every RL episode.
  int train_batches = 100;
  int target_sync_episodes = 50;
  /// Training scenarios (demonstrations and RL) start the robot at a random
  /// heading; evaluation keeps the scenario setting.
  bool random_start_heading = false;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Per-decision discount gamma^(dt * v_pref).
struct DiscountRule {
  double gamma = 0.9;
  double v_pref = 1.0;
  double dt = 0.25;

  double factor() const;
};

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state as the network sees it, with its regression target.
struct Experience {
  NetInput input;
  double target = 0.0;
};

/// Everything select_action needs to score one-step look-aheads.
struct LookaheadModel {
  const ValueNetParams* params = nullptr;
  RewardConfig reward;
  RewardTerms terms;
  StepConfig step;
  DiscountRule rule;
};

/// One-step look-ahead policy: with probability epsilon a uniformly random
/// action, otherwise argmax over actions of R(s, a) + factor * V(s'), where s'
/// moves the robot by the action and the humans at constant velocity over dt.
/// Ties go to the lowest action index.
Action select_action(const LookaheadModel& model, const JointState& state,
                     std::span<const Action> actions, double epsilon, const PolicyContext& ctx);

/// Score R(s, a) + factor * V(s') of every action (no exploration).
std::vector<double> action_scores(const LookaheadModel& model, const JointState& state,
                                  std::span<const Action> actions, const PolicyContext& ctx);

class ValueNetworkPolicy : public Policy {
 public:
  ValueNetworkPolicy(LookaheadModel model, std::vector<Action> actions, double epsilon = 0.0)
      : model_(model), actions_(std::move(actions)), epsilon_(epsilon) {}
  Action act(const JointState& state, const PolicyContext& ctx) const override {
    return select_action(model_, state, actions_, epsilon_, ctx);
  }
  std::string name() const override { return "net"; }

 private:
  LookaheadModel model_;
  std::vector<Action> actions_;
  double epsilon_;
};

/// Linear decay from eps_start to eps_end over eps_decay_episodes, then flat.
double epsilon_at(int episode, const TrainConfig& cfg);

double td_target(double reward, double next_value, bool terminal, const DiscountRule& rule);

/// Discounted reward-to-go for every step: out[k] = sum_{j >= k} factor^(j-k) r_j.
std::vector<double> discounted_returns(std::span<const double> rewards, double factor);

/// Scenario for training episode `index` of a stream; deterministic in its inputs.
using ScenarioSource = std::function<Scenario(std::uint64_t index)>;

ScenarioSource seeded_scenarios(const ScenarioConfig& cfg, std::uint64_t seed,
                                std::uint64_t stream);

struct DemonstrationSet {
  std::vector<Experience> experiences;
  std::vector<EpisodeRecord> episodes;
};

/// Runs n ORCA-driven episodes and labels every visited pre-action state with
/// its discounted reward-to-go. Failed episodes are kept.
DemonstrationSet collect_demonstrations(int n, const ScenarioSource& scenarios,
                                        const EpisodeConfig& cfg, const LocalMapConfig& maps,
                                        const DiscountRule& rule, std::uint64_t seed);

/// Adam on mean squared error.
class Adam {
 public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(std::vector<double>& params, std::span<const double> grad);
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

/// One optimizer step on the mean loss of `batch`; returns that mean loss
/// (measured before the step).
double train_step(ValueNetParams& params, std::span<const Experience* const> batch, Adam& opt);

/// Mean squared error over the dataset.
double dataset_loss(const ValueNetParams& params, std::span<const Experience> data);

/// il_epochs passes of shuffled mini-batches (batch_size) with Adam at il_lr.
/// Appends each epoch's mean loss to `epoch_losses` when given.
ValueNetParams imitation_fit(ValueNetParams params, std::span<const Experience> data,
                             const TrainConfig& cfg, Rng& rng,
                             std::vector<double>* epoch_losses = nullptr);

/// Fixed-capacity ring; the oldest experience is overwritten when full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Experience e);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& operator[](std::size_t i) const { return items_[i]; }
  /// Indices drawn uniformly with replacement.
  std::vector<const Experience*> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Experience> items_;
};

struct EpisodeLogEntry {
  int episode = 0;
  Outcome outcome = Outcome::timeout;
  double discounted_return = 0.0;
  int steps = 0;
  double td_loss = 0.0;
  double epsilon = 0.0;
};

/// One line of the training log.
std::string format_log_line(const EpisodeLogEntry& e);

struct RlResult {
  ValueNetParams params;
  std::vector<EpisodeLogEntry> log;
};

/// V-learning: epsilon-greedy rollouts, TD targets from a target network synced
/// every target_sync_episodes, train_batches Adam steps per episode. Throws
/// DivergenceError on a non-finite loss. `on_episode` sees each log entry as it
/// is produced.
RlResult rl_train(ValueNetParams params, const TrainConfig& cfg, const ScenarioSource& scenarios,
                  const EpisodeConfig& episode_cfg,
                  const std::function<void(const EpisodeLogEntry&)>& on_episode = {});

std::vector<Action> action_space(const EpisodeConfig& cfg, double v_pref);
LookaheadModel make_lookahead(const ValueNetParams& params, const EpisodeConfig& cfg,
                              double gamma, double v_pref);

}  // namespace rsarl

#endif  // RSARL_TRAINING_HPP_
