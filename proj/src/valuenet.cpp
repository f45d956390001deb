#include "rsarl/valuenet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rsarl {
namespace {

std::vector<LocalMap> maps_from_rotated(const RotatedState& rotated_state,
                                        const LocalMapConfig& cfg) {
  const auto& humans = rotated_state.humans;
  const std::size_t n = humans.size();
  const int side = cfg.grid_side;
  const double half = side / 2.0;
  std::vector<LocalMap> maps(n);
  for (std::size_t i = 0; i < n; ++i) {
    LocalMap& map = maps[i];
    map.grid_side = side;
    map.data.assign(static_cast<std::size_t>(cfg.size()), 0.0);

    const Vec2 center{humans[i].px, humans[i].py};
    const Vec2 vel{humans[i].vx, humans[i].vy};
    const double heading = vel.norm_sq() > 0.0 ? std::atan2(vel.y, vel.x) : 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vec2 offset = rotated(Vec2{humans[j].px, humans[j].py} - center, -heading);
      const double fx = std::floor(offset.x / cfg.cell_size + half);
      const double fy = std::floor(offset.y / cfg.cell_size + half);
      if (fx < 0.0 || fy < 0.0 || fx >= side || fy >= side) continue;
      const std::size_t c = map.cell(static_cast<int>(fx), static_cast<int>(fy));
      const Vec2 v = rotated(Vec2{humans[j].vx, humans[j].vy}, -heading);
      map.data[c] += 1.0;
      map.data[c + 1] += v.x;
      map.data[c + 2] += v.y;
    }
    for (std::size_t c = 0; c < map.data.size(); c += LocalMapConfig::kChannels) {
      if (map.data[c] > 0.0) {
        map.data[c + 1] /= map.data[c];
        map.data[c + 2] /= map.data[c];
      }
    }
  }
  return maps;
}

void check_widths(const std::vector<int>& widths, const std::string& name, bool scalar_output) {
  if (widths.empty()) throw std::invalid_argument("network." + name + ": needs at least one layer");
  for (const int w : widths) {
    if (w < 1) throw std::invalid_argument("network." + name + ": layer widths must be >= 1");
  }
  if (scalar_output && widths.back() != 1) {
    throw std::invalid_argument("network." + name + ": last layer width must be 1");
  }
}

Mlp make_mlp(int input, const std::vector<int>& widths) {
  Mlp mlp;
  int fan_in = input;
  for (const int w : widths) {
    mlp.layers.push_back({Eigen::MatrixXd::Zero(w, fan_in), Eigen::VectorXd::Zero(w)});
    fan_in = w;
  }
  return mlp;
}

template <typename Fn>
void visit_arrays(Mlp& mlp, Fn&& fn) {
  for (auto& layer : mlp.layers) {
    fn(layer.weight, layer.weight.cols());
    fn(layer.bias, layer.weight.cols());
  }
}

template <typename Fn>
void visit_arrays(const Mlp& mlp, Fn&& fn) {
  for (const auto& layer : mlp.layers) {
    fn(layer.weight);
    fn(layer.bias);
  }
}

// Row-major flattening of a column-major matrix or a vector.
template <typename Derived>
void append_row_major(const Eigen::MatrixBase<Derived>& m, std::vector<double>& out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
}

template <typename Derived>
std::size_t read_row_major(Eigen::MatrixBase<Derived>& m, std::span<const double> flat,
                           std::size_t pos) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = flat[pos++];
  }
  return pos;
}

Eigen::MatrixXd activate(const Eigen::MatrixXd& z, Activation act) {
  if (act == Activation::relu) return z.cwiseMax(0.0);
  return z.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
}

Eigen::MatrixXd activation_slope(const Eigen::MatrixXd& z, Activation act) {
  if (act == Activation::relu) {
    return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
  }
  return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
}

// Per-layer inputs and pre-activations of a batched (row-per-sample) MLP pass.
struct MlpTape {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> pre;
};

Eigen::MatrixXd mlp_forward(const Mlp& mlp, const Eigen::MatrixXd& x, bool activate_last,
                            Activation act, MlpTape* tape) {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    const DenseLayer& layer = mlp.layers[l];
    Eigen::MatrixXd z = a * layer.weight.transpose();
    z.rowwise() += layer.bias.transpose();
    const bool apply = activate_last || l + 1 < mlp.layers.size();
    if (tape) {
      tape->inputs.push_back(std::move(a));
      tape->pre.push_back(z);
    }
    a = apply ? activate(z, act) : std::move(z);
  }
  return a;
}

// Backpropagates d(loss)/d(output) through the MLP, accumulating parameter
// gradients into `grad` and returning d(loss)/d(input).
Eigen::MatrixXd mlp_backward(const Mlp& mlp, const MlpTape& tape, Eigen::MatrixXd d_out,
                             bool activate_last, Activation act, Mlp& grad) {
  for (std::size_t l = mlp.layers.size(); l-- > 0;) {
    const bool applied = activate_last || l + 1 < mlp.layers.size();
    if (applied) d_out.array() *= activation_slope(tape.pre[l], act).array();
    grad.layers[l].weight.noalias() += d_out.transpose() * tape.inputs[l];
    grad.layers[l].bias += d_out.colwise().sum().transpose();
    d_out = d_out * mlp.layers[l].weight;
  }
  return d_out;
}

struct Tape {
  MlpTape embedding;
  MlpTape attention;
  MlpTape head;
  Eigen::MatrixXd embeddings;
  Eigen::VectorXd weights;
};

void check_input(const ValueNetParams& params, const NetInput& input) {
  const NetworkConfig& cfg = params.config;
  if (input.robot.size() != RobotFeatures::kSize) {
    throw std::invalid_argument("value network: robot input has width " +
                                std::to_string(input.robot.size()) + ", expected " +
                                std::to_string(RobotFeatures::kSize));
  }
  if (input.humans.rows() > 0 && input.humans.cols() != cfg.embedding_input()) {
    throw std::invalid_argument("value network: human input has width " +
                                std::to_string(input.humans.cols()) + ", expected " +
                                std::to_string(cfg.embedding_input()));
  }
}

double run_forward(const ValueNetParams& params, const NetInput& input, Tape* tape,
                   ForwardTrace* trace) {
  check_input(params, input);
  const NetworkConfig& cfg = params.config;
  const Activation act = cfg.activation;
  const Eigen::Index n = input.humans.rows();
  const int m = cfg.embedding_output();

  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd embeddings(n, m);
  Eigen::VectorXd logits(n);
  Eigen::VectorXd weights(n);
  if (n > 0) {
    embeddings = mlp_forward(params.embedding, input.humans, true, act,
                             tape ? &tape->embedding : nullptr);
    const Eigen::RowVectorXd mean = embeddings.colwise().mean();
    Eigen::MatrixXd score_in(n, 2 * m);
    score_in.leftCols(m) = embeddings;
    score_in.rightCols(m) = mean.replicate(n, 1);
    logits = mlp_forward(params.attention, score_in, false, act,
                         tape ? &tape->attention : nullptr)
                 .col(0);
    weights = softmax(logits);
    pooled = embeddings.transpose() * weights;
  }

  Eigen::MatrixXd head_in(1, cfg.head_input());
  head_in.leftCols(RobotFeatures::kSize) = input.robot.transpose();
  head_in.rightCols(m) = pooled.transpose();
  const double value =
      mlp_forward(params.head, head_in, false, act, tape ? &tape->head : nullptr)(0, 0);

  if (tape) {
    tape->embeddings = embeddings;
    tape->weights = weights;
  }
  if (trace) {
    trace->embeddings = std::move(embeddings);
    trace->logits = std::move(logits);
    trace->weights = std::move(weights);
    trace->pooled = std::move(pooled);
    trace->value = value;
  }
  return value;
}

}  // namespace

std::vector<LocalMap> build_local_maps(const JointState& state, const LocalMapConfig& cfg) {
  return maps_from_rotated(rotate_to_robot_frame(state), cfg);
}

void NetworkConfig::validate() const {
  check_widths(embedding, "embedding", false);
  check_widths(attention, "attention", true);
  check_widths(head, "head", true);
  if (map.grid_side < 1) throw std::invalid_argument("network.grid_side: must be >= 1");
  if (!(map.cell_size > 0.0)) throw std::invalid_argument("network.cell_size: must be > 0");
}

ValueNetParams ValueNetParams::zeros(const NetworkConfig& cfg) {
  cfg.validate();
  ValueNetParams p;
  p.config = cfg;
  p.embedding = make_mlp(cfg.embedding_input(), cfg.embedding);
  p.attention = make_mlp(cfg.attention_input(), cfg.attention);
  p.head = make_mlp(cfg.head_input(), cfg.head);
  return p;
}

ValueNetParams ValueNetParams::initialize(const NetworkConfig& cfg, Rng& rng) {
  ValueNetParams p = zeros(cfg);
  auto init = [&rng](auto& array, Eigen::Index fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index r = 0; r < array.rows(); ++r) {
      for (Eigen::Index c = 0; c < array.cols(); ++c) array(r, c) = uniform(rng, -bound, bound);
    }
  };
  visit_arrays(p.embedding, init);
  visit_arrays(p.attention, init);
  visit_arrays(p.head, init);
  return p;
}

std::size_t ValueNetParams::size() const {
  std::size_t total = 0;
  auto count = [&total](const auto& array) { total += static_cast<std::size_t>(array.size()); };
  visit_arrays(embedding, count);
  visit_arrays(attention, count);
  visit_arrays(head, count);
  return total;
}

std::vector<double> ValueNetParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  auto append = [&flat](const auto& array) { append_row_major(array, flat); };
  visit_arrays(embedding, append);
  visit_arrays(attention, append);
  visit_arrays(head, append);
  return flat;
}

void ValueNetParams::assign(std::span<const double> flat) {
  if (flat.size() != size()) {
    throw std::invalid_argument("ValueNetParams::assign: got " + std::to_string(flat.size()) +
                                " values, expected " + std::to_string(size()));
  }
  std::size_t pos = 0;
  auto read = [&](auto& array, Eigen::Index) { pos = read_row_major(array, flat, pos); };
  visit_arrays(embedding, read);
  visit_arrays(attention, read);
  visit_arrays(head, read);
}

bool ValueNetParams::all_finite() const {
  bool ok = true;
  auto check = [&ok](const auto& array) { ok = ok && array.allFinite(); };
  visit_arrays(embedding, check);
  visit_arrays(attention, check);
  visit_arrays(head, check);
  return ok;
}

NetInput encode(const RotatedState& rotated, std::span<const LocalMap> maps) {
  const Eigen::Index n = static_cast<Eigen::Index>(rotated.humans.size());
  if (maps.size() != rotated.humans.size()) {
    throw std::invalid_argument("encode: one local map per human required");
  }
  const int map_size = maps.empty() ? 0 : static_cast<int>(maps.front().data.size());
  const int width = RobotFeatures::kSize + HumanFeatures::kSize + map_size;

  NetInput in;
  in.robot.resize(RobotFeatures::kSize);
  in.robot << rotated.robot.goal_distance, rotated.robot.v_pref, rotated.robot.goal_bearing,
      rotated.robot.radius;
  in.humans.resize(n, width);
  for (Eigen::Index i = 0; i < n; ++i) {
    const HumanFeatures& h = rotated.humans[static_cast<std::size_t>(i)];
    const auto& map = maps[static_cast<std::size_t>(i)].data;
    if (static_cast<int>(map.size()) != map_size) {
      throw std::invalid_argument("encode: local maps differ in size");
    }
    in.humans.block(i, 0, 1, RobotFeatures::kSize) = in.robot.transpose();
    in.humans.block(i, RobotFeatures::kSize, 1, HumanFeatures::kSize) << h.px, h.py, h.vx, h.vy,
        h.radius, h.distance, h.combined_radius;
    for (int k = 0; k < map_size; ++k) {
      in.humans(i, RobotFeatures::kSize + HumanFeatures::kSize + k) =
          map[static_cast<std::size_t>(k)];
    }
  }
  return in;
}

NetInput encode(const JointState& state, const LocalMapConfig& cfg) {
  const RotatedState rotated = rotate_to_robot_frame(state);
  const auto maps = maps_from_rotated(rotated, cfg);
  NetInput in = encode(rotated, maps);
  if (rotated.humans.empty()) {
    in.humans.resize(0, RobotFeatures::kSize + HumanFeatures::kSize + cfg.size());
  }
  return in;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) return logits;
  const Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

double forward(const ValueNetParams& params, const NetInput& input, ForwardTrace* trace) {
  return run_forward(params, input, nullptr, trace);
}

double forward(const ValueNetParams& params, const RotatedState& rotated,
               std::span<const LocalMap> maps, ForwardTrace* trace) {
  return forward(params, encode(rotated, maps), trace);
}

double accumulate_gradient(const ValueNetParams& params, const NetInput& input, double target,
                           double scale, ValueNetParams& accum) {
  Tape tape;
  const double value = run_forward(params, input, &tape, nullptr);
  const double error = value - target;
  const Activation act = params.config.activation;
  const int m = params.config.embedding_output();

  Eigen::MatrixXd d_value(1, 1);
  d_value(0, 0) = 2.0 * scale * error;
  const Eigen::MatrixXd d_head_in =
      mlp_backward(params.head, tape.head, d_value, false, act, accum.head);

  const Eigen::Index n = input.humans.rows();
  if (n > 0) {
    const Eigen::VectorXd d_pooled = d_head_in.rightCols(m).transpose();
    const Eigen::VectorXd& w = tape.weights;
    // pooled = E^T w
    Eigen::MatrixXd d_emb = w * d_pooled.transpose();
    const Eigen::VectorXd d_w = tape.embeddings * d_pooled;
    // softmax Jacobian-vector product
    const Eigen::VectorXd d_logits = (w.array() * (d_w.array() - w.dot(d_w))).matrix();
    const Eigen::MatrixXd d_score_in =
        mlp_backward(params.attention, tape.attention, d_logits, false, act, accum.attention);
    d_emb += d_score_in.leftCols(m);
    const Eigen::RowVectorXd d_mean = d_score_in.rightCols(m).colwise().sum();
    d_emb.rowwise() += d_mean / static_cast<double>(n);
    mlp_backward(params.embedding, tape.embedding, std::move(d_emb), true, act, accum.embedding);
  }
  return error * error;
}

ValueNetParams gradient(const ValueNetParams& params, const NetInput& input, double target,
                        double scale, double* loss) {
  ValueNetParams grad = ValueNetParams::zeros(params.config);
  const double l = accumulate_gradient(params, input, target, scale, grad);
  if (loss) *loss = l;
  return grad;
}

}  // namespace rsarl
