#ifndef RSARL_CLI_HPP_
#define RSARL_CLI_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "rsarl/config.hpp"
#include "rsarl/episode.hpp"
#include "rsarl/training.hpp"
#include "rsarl/valuenet.hpp"

namespace rsarl {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitDivergence = 4,
  kExitCheckpoint = 5,
  kExitInvalidArgument = 6,
};

inline constexpr const char* kArtifactVersion = "0.1.0";

struct ImitationResult {
  ValueNetParams params;
  std::vector<double> epoch_losses;
  int demonstration_states = 0;
};

/// Random initialization, ORCA demonstrations and the imitation fit, all
/// randomness derived from cfg.train.seed. With il_episodes = 0 the initial
/// parameters are returned unchanged.
ImitationResult imitation_stage(const RunConfig& cfg);

/// RL on top of `params`. Throws DivergenceError.
RlResult rl_stage(const RunConfig& cfg, ValueNetParams params,
                  const std::function<void(const EpisodeLogEntry&)>& on_episode = {});

struct TrainArtifacts {
  ImitationResult imitation;
  RlResult rl;
};

TrainArtifacts train_pipeline(const RunConfig& cfg,
                              const std::function<void(const EpisodeLogEntry&)>& on_episode = {});

/// "net" needs `params` (kept by pointer), "orca" and "straight" ignore it.
/// Throws std::invalid_argument for unknown kinds.
std::unique_ptr<Policy> make_policy(const std::string& kind, const RunConfig& cfg,
                                    const ValueNetParams* params);

/// Subcommands train, eval, export and demo; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsarl

#endif  // RSARL_CLI_HPP_
