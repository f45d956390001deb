#include "rsarl/training.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace rsarl {
namespace {

// Stream tags keep the RNG streams of the pipeline stages independent.
constexpr std::uint64_t kDemoStream = 0x64656d6fULL;
constexpr std::uint64_t kRlStream = 0x726c6570ULL;
constexpr std::uint64_t kBatchStream = 0x62617463ULL;

JointState lookahead_state(const JointState& state, const Action& action, const StepConfig& step) {
  JointState next;
  next.robot = propagate_robot(state.robot, action, step);
  next.humans.reserve(state.humans.size());
  for (const ObservableState& h : state.humans) next.humans.push_back(extrapolate(h, step.dt));
  return next;
}

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("train.") + field + ": " + what);
  };
  require(il_episodes >= 0, "il_episodes", "must be >= 0");
  require(il_epochs >= 0, "il_epochs", "must be >= 0");
  require(il_lr >= 0.0, "il_lr", "must be >= 0");
  require(rl_episodes >= 0, "rl_episodes", "must be >= 0");
  require(rl_lr >= 0.0, "rl_lr", "must be >= 0");
  require(gamma > 0.0 && gamma < 1.0, "gamma", "must be in (0, 1)");
  require(eps_end >= 0.0, "eps_end", "must be >= 0");
  require(eps_start >= eps_end && eps_start <= 1.0, "eps_start", "must be in [eps_end, 1]");
  require(eps_decay_episodes >= 0, "eps_decay_episodes", "must be >= 0");
  require(replay_capacity >= 1, "replay_capacity", "must be >= 1");
  require(batch_size >= 1, "batch_size", "must be >= 1");
  require(train_batches >= 0, "train_batches", "must be >= 0");
  require(target_sync_episodes >= 1, "target_sync_episodes", "must be >= 1");
}

double DiscountRule::factor() const { return std::pow(gamma, dt * v_pref); }

std::vector<double> action_scores(const LookaheadModel& model, const JointState& state,
                                  std::span<const Action> actions, const PolicyContext& ctx) {
  const double factor = model.rule.factor();
  const double t_next = ctx.time + model.step.dt;
  std::vector<double> scores;
  scores.reserve(actions.size());
  for (const Action& a : actions) {
    const JointState next = lookahead_state(state, a, model.step);
    const RewardBreakdown r =
        total_reward(state, next, a, t_next, ctx.static_ids, model.reward, model.terms);
    const double v = forward(*model.params, encode(next, model.params->config.map));
    scores.push_back(r.total + factor * v);
  }
  return scores;
}

Action select_action(const LookaheadModel& model, const JointState& state,
                     std::span<const Action> actions, double epsilon, const PolicyContext& ctx) {
  if (actions.empty()) throw std::invalid_argument("select_action: empty action list");
  if (epsilon > 0.0) {
    if (!ctx.rng) throw std::invalid_argument("select_action: exploration needs an rng");
    if (uniform01(*ctx.rng) < epsilon) return actions[uniform_index(*ctx.rng, actions.size())];
  }
  const auto scores = action_scores(model, state, actions, ctx);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return actions[best];
}

double epsilon_at(int episode, const TrainConfig& cfg) {
  if (episode >= cfg.eps_decay_episodes) return cfg.eps_end;
  const double frac = static_cast<double>(episode) / cfg.eps_decay_episodes;
  return cfg.eps_start + (cfg.eps_end - cfg.eps_start) * frac;
}

double td_target(double reward, double next_value, bool terminal, const DiscountRule& rule) {
  return terminal ? reward : reward + rule.factor() * next_value;
}

std::vector<double> discounted_returns(std::span<const double> rewards, double factor) {
  std::vector<double> out(rewards.size());
  double acc = 0.0;
  for (std::size_t k = rewards.size(); k-- > 0;) {
    acc = rewards[k] + factor * acc;
    out[k] = acc;
  }
  return out;
}

ScenarioSource seeded_scenarios(const ScenarioConfig& cfg, std::uint64_t seed,
                                std::uint64_t stream) {
  return [cfg, seed, stream](std::uint64_t index) {
    return generate_scenario(cfg, derive_seed(derive_seed(seed, stream), index));
  };
}

std::vector<Action> action_space(const EpisodeConfig& cfg, double v_pref) {
  return build_action_space(v_pref, cfg.n_headings, cfg.dtheta_max);
}

LookaheadModel make_lookahead(const ValueNetParams& params, const EpisodeConfig& cfg,
                              double gamma, double v_pref) {
  return {&params, cfg.reward, cfg.terms, cfg.step, {gamma, v_pref, cfg.step.dt}};
}

DemonstrationSet collect_demonstrations(int n, const ScenarioSource& scenarios,
                                        const EpisodeConfig& cfg, const LocalMapConfig& maps,
                                        const DiscountRule& rule, std::uint64_t seed) {
  DemonstrationSet set;
  const double factor = rule.factor();
  for (int i = 0; i < n; ++i) {
    const Scenario sc = scenarios(static_cast<std::uint64_t>(i));
    OrcaConfig orca = cfg.orca;
    orca.dt = cfg.step.dt;
    const OrcaPolicy expert(action_space(cfg, sc.robot.v_pref), orca);
    Rng rng(derive_seed(derive_seed(seed, kDemoStream), static_cast<std::uint64_t>(i)));
    EpisodeRecord rec = run_episode(expert, sc, cfg, rng);

    std::vector<double> rewards;
    rewards.reserve(rec.steps());
    for (const RewardBreakdown& r : rec.rewards) rewards.push_back(r.total);
    const auto targets = discounted_returns(rewards, factor);
    for (std::size_t k = 0; k < rec.steps(); ++k) {
      set.experiences.push_back({encode(rec.snapshots[k].joint_state(), maps), targets[k]});
    }
    set.episodes.push_back(std::move(rec));
  }
  return set;
}

void Adam::step(std::vector<double>& params, std::span<const double> grad) {
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0);
    v_.assign(params.size(), 0.0);
    t_ = 0;
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

double train_step(ValueNetParams& params, std::span<const Experience* const> batch, Adam& opt) {
  if (batch.empty()) return 0.0;
  ValueNetParams grad = ValueNetParams::zeros(params.config);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const Experience* e : batch) {
    loss += accumulate_gradient(params, e->input, e->target, scale, grad);
  }
  loss *= scale;
  if (!std::isfinite(loss)) {
    throw DivergenceError("training diverged: non-finite loss " + std::to_string(loss));
  }
  std::vector<double> flat = params.flatten();
  opt.step(flat, grad.flatten());
  params.assign(flat);
  return loss;
}

double dataset_loss(const ValueNetParams& params, std::span<const Experience> data) {
  if (data.empty()) return 0.0;
  double total = 0.0;
  for (const Experience& e : data) {
    const double err = forward(params, e.input) - e.target;
    total += err * err;
  }
  return total / static_cast<double>(data.size());
}

ValueNetParams imitation_fit(ValueNetParams params, std::span<const Experience> data,
                             const TrainConfig& cfg, Rng& rng, std::vector<double>* epoch_losses) {
  if (data.empty()) throw std::invalid_argument("imitation_fit: empty dataset");
  Adam opt(cfg.il_lr);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  std::vector<const Experience*> items;
  for (int epoch = 0; epoch < cfg.il_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      items.clear();
      for (std::size_t j = start; j < end; ++j) items.push_back(&data[order[j]]);
      epoch_loss += train_step(params, items, opt) * static_cast<double>(end - start);
    }
    if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return params;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be >= 1");
}

void ReplayBuffer::push(Experience e) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(e));
  } else {
    items_[next_] = std::move(e);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<const Experience*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<const Experience*> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(&items_[uniform_index(rng, items_.size())]);
  return out;
}

std::string format_log_line(const EpisodeLogEntry& e) {
  nlohmann::ordered_json j;
  j["episode"] = e.episode;
  j["outcome"] = std::string(to_string(e.outcome));
  j["return"] = e.discounted_return;
  j["steps"] = e.steps;
  j["td_loss"] = e.td_loss;
  j["epsilon"] = e.epsilon;
  return j.dump();
}

RlResult rl_train(ValueNetParams params, const TrainConfig& cfg, const ScenarioSource& scenarios,
                  const EpisodeConfig& episode_cfg,
                  const std::function<void(const EpisodeLogEntry&)>& on_episode) {
  RlResult result;
  ValueNetParams target = params;
  Adam opt(cfg.rl_lr);
  ReplayBuffer replay(static_cast<std::size_t>(cfg.replay_capacity));
  Rng batch_rng(derive_seed(cfg.seed, kBatchStream));

  for (int ep = 0; ep < cfg.rl_episodes; ++ep) {
    const double eps = epsilon_at(ep, cfg);
    const Scenario sc = scenarios(static_cast<std::uint64_t>(ep));
    const double v_pref = sc.robot.v_pref;
    const DiscountRule rule{cfg.gamma, v_pref, episode_cfg.step.dt};
    const ValueNetworkPolicy policy(make_lookahead(params, episode_cfg, cfg.gamma, v_pref),
                                    action_space(episode_cfg, v_pref), eps);
    Rng rng(derive_seed(derive_seed(cfg.seed, kRlStream), static_cast<std::uint64_t>(ep)));
    const EpisodeRecord rec = run_episode(policy, sc, episode_cfg, rng);

    const std::size_t steps = rec.steps();
    const LocalMapConfig& maps = params.config.map;
    NetInput next_input = encode(rec.snapshots[0].joint_state(), maps);
    double ret = 0.0;
    double discount = 1.0;
    for (std::size_t k = 0; k < steps; ++k) {
      NetInput input = std::move(next_input);
      next_input = encode(rec.snapshots[k + 1].joint_state(), maps);
      const bool terminal = k + 1 == steps;
      const double reward = rec.rewards[k].total;
      const double next_value = terminal ? 0.0 : forward(target, next_input);
      replay.push({std::move(input), td_target(reward, next_value, terminal, rule)});
      ret += discount * reward;
      discount *= rule.factor();
    }

    double loss = 0.0;
    int batches = 0;
    if (replay.size() >= static_cast<std::size_t>(cfg.batch_size)) {
      for (int b = 0; b < cfg.train_batches; ++b) {
        const auto batch = replay.sample(static_cast<std::size_t>(cfg.batch_size), batch_rng);
        loss += train_step(params, batch, opt);
        ++batches;
      }
    }
    if (batches > 0) loss /= batches;

    if ((ep + 1) % cfg.target_sync_episodes == 0) target = params;

    EpisodeLogEntry entry{ep, rec.outcome, ret, static_cast<int>(steps), loss, eps};
    result.log.push_back(entry);
    if (on_episode) on_episode(entry);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace rsarl
