#ifndef RSARL_VALUENET_HPP_
#define RSARL_VALUENET_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rsarl/domain.hpp"
#include "rsarl/random.hpp"

namespace rsarl {

/// Coarse occupancy grid around each human: per cell the neighbor count and
/// the mean neighbor velocity, expressed in that human's heading frame.
struct LocalMapConfig {
  int grid_side = 4;
  double cell_size = 1.0;  // m
  static constexpr int kChannels = 3;

  int size() const { return grid_side * grid_side * kChannels; }
  bool operator==(const LocalMapConfig&) const = default;
};

/// Flattened grid, cell (ix, iy) at offset ((iy * grid_side) + ix) * 3 holding
/// [count, mean vx, mean vy].
struct LocalMap {
  int grid_side = 0;
  std::vector<double> data;

  double count(int ix, int iy) const { return data[cell(ix, iy)]; }
  Vec2 mean_velocity(int ix, int iy) const {
    return {data[cell(ix, iy) + 1], data[cell(ix, iy) + 2]};
  }
  std::size_t cell(int ix, int iy) const {
    return static_cast<std::size_t>((iy * grid_side + ix) * LocalMapConfig::kChannels);
  }
};

/// One map per human, centered on it and aligned with its heading (its velocity
/// direction in the robot frame, or the robot frame axes when it is not moving).
/// Humans falling outside the grid are dropped.
std::vector<LocalMap> build_local_maps(const JointState& state, const LocalMapConfig& cfg);

enum class Activation { relu, elu };

/// Layer widths include the output layer, so attention and head must end in 1.
struct NetworkConfig {
  std::vector<int> embedding{150, 100};
  std::vector<int> attention{100, 100, 1};
  std::vector<int> head{150, 100, 100, 1};
  LocalMapConfig map;
  Activation activation = Activation::elu;

  int embedding_input() const { return RobotFeatures::kSize + HumanFeatures::kSize + map.size(); }
  int embedding_output() const { return embedding.back(); }
  int attention_input() const { return 2 * embedding_output(); }
  int head_input() const { return RobotFeatures::kSize + embedding_output(); }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool operator==(const NetworkConfig&) const = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct Mlp {
  std::vector<DenseLayer> layers;
};

/// Network weights. Flat order: embedding, attention, head; within each MLP
/// layer by layer, the weight matrix row-major followed by the bias.
struct ValueNetParams {
  NetworkConfig config;
  Mlp embedding;
  Mlp attention;
  Mlp head;

  static ValueNetParams zeros(const NetworkConfig& cfg);
  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] for weights and biases.
  static ValueNetParams initialize(const NetworkConfig& cfg, Rng& rng);

  std::size_t size() const;
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
  bool all_finite() const;
};

/// Network input: the robot part and one row per human of
/// [robot part, human part, flattened local map].
struct NetInput {
  Eigen::VectorXd robot;
  Eigen::MatrixXd humans;
};

NetInput encode(const RotatedState& rotated, std::span<const LocalMap> maps);
NetInput encode(const JointState& state, const LocalMapConfig& cfg);

struct ForwardTrace {
  Eigen::MatrixXd embeddings;  // humans x embedding_output
  Eigen::VectorXd logits;
  Eigen::VectorXd weights;
  Eigen::VectorXd pooled;
  double value = 0.0;
};

/// Throws std::invalid_argument when the input width does not match the config.
double forward(const ValueNetParams& params, const NetInput& input, ForwardTrace* trace = nullptr);
double forward(const ValueNetParams& params, const RotatedState& rotated,
               std::span<const LocalMap> maps, ForwardTrace* trace = nullptr);

/// Gradient of `scale * (value - target)^2`; returned with the shapes of params.
/// Also reports the loss (unscaled) when requested.
ValueNetParams gradient(const ValueNetParams& params, const NetInput& input, double target,
                        double scale = 1.0, double* loss = nullptr);

/// Adds the gradient of `scale * (value - target)^2` into `accum` and returns the loss.
double accumulate_gradient(const ValueNetParams& params, const NetInput& input, double target,
                           double scale, ValueNetParams& accum);

/// Numerically stable softmax.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

}  // namespace rsarl

#endif  // RSARL_VALUENET_HPP_
