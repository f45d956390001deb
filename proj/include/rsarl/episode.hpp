#ifndef RSARL_EPISODE_HPP_
#define RSARL_EPISODE_HPP_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsarl/crowd_policy.hpp"
#include "rsarl/domain.hpp"
#include "rsarl/kinematics.hpp"
#include "rsarl/random.hpp"
#include "rsarl/reward.hpp"
#include "rsarl/scenario.hpp"

namespace rsarl {

/// Everything the episode loop needs besides the scenario and the policy.
struct EpisodeConfig {
  RewardConfig reward;
  RewardTerms terms;
  StepConfig step;
  OrcaConfig orca;
  int n_headings = 10;
  double dtheta_max = deg_to_rad(10.0);  // rad per decision step
};

/// What a robot policy may know besides the joint state.
struct PolicyContext {
  std::span<const std::size_t> static_ids;
  double time = 0.0;
  Rng* rng = nullptr;
};

class Policy {
 public:
  virtual ~Policy() = default;
  /// Must be safe to call concurrently from several episodes.
  virtual Action act(const JointState& state, const PolicyContext& ctx) const = 0;
  virtual std::string name() const = 0;
};

/// Turns toward the goal as fast as the action set allows and drives at v_pref.
class StraightPolicy : public Policy {
 public:
  explicit StraightPolicy(std::vector<Action> actions) : actions_(std::move(actions)) {}
  Action act(const JointState& state, const PolicyContext& ctx) const override;
  std::string name() const override { return "straight"; }

 private:
  std::vector<Action> actions_;
};

/// The robot runs ORCA against the humans and executes the discrete action whose
/// resulting velocity is nearest the ORCA velocity (ties: lowest index).
class OrcaPolicy : public Policy {
 public:
  OrcaPolicy(std::vector<Action> actions, OrcaConfig cfg)
      : actions_(std::move(actions)), cfg_(cfg) {}
  Action act(const JointState& state, const PolicyContext& ctx) const override;
  std::string name() const override { return "orca"; }

  /// Nearest discrete action to a holonomic velocity for a robot with heading theta.
  static std::size_t project(std::span<const Action> actions, double theta, const Vec2& velocity);

 private:
  std::vector<Action> actions_;
  OrcaConfig cfg_;
};

/// Always stops.
class StopPolicy : public Policy {
 public:
  Action act(const JointState&, const PolicyContext&) const override { return {}; }
  std::string name() const override { return "stop"; }
};

enum class Outcome { success, collision, timeout };

std::string_view to_string(Outcome outcome);
Outcome outcome_from_string(std::string_view name);

struct Snapshot {
  double t = 0.0;
  FullAgentState robot;
  std::vector<FullAgentState> humans;

  JointState joint_state() const;
};

/// snapshots[k] is the state at t = k*dt; actions[k], rewards[k] and
/// clearances[k] belong to the transition k -> k+1.
struct EpisodeRecord {
  std::uint64_t seed = 0;
  EnvType env = EnvType::none;
  std::vector<std::size_t> static_ids;
  std::vector<Snapshot> snapshots;
  std::vector<Action> actions;
  std::vector<RewardBreakdown> rewards;
  std::vector<double> clearances;  // d_t after each transition
  Outcome outcome = Outcome::timeout;
  double nav_time = 0.0;  // s, time of the terminal snapshot
  int discomfort_steps = 0;

  std::size_t steps() const { return actions.size(); }
};

/// Simultaneous-update loop: the policy and the crowd both read snapshot k, then
/// everybody moves. Ends on collision, goal, or t >= t_limit, checked in that order.
EpisodeRecord run_episode(const Policy& policy, const Scenario& scenario,
                          const EpisodeConfig& cfg, Rng& rng);

/// True iff 0 <= d_t < d_disc.
bool is_discomfort(double clearance, double d_disc);

}  // namespace rsarl

#endif  // RSARL_EPISODE_HPP_
