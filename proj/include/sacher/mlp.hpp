#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace sacher {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using WeightMap = Eigen::Map<RowMajorMatrix>;
using ConstWeightMap = Eigen::Map<const RowMajorMatrix>;
using BiasMap = Eigen::Map<Eigen::VectorXd>;
using ConstBiasMap = Eigen::Map<const Eigen::VectorXd>;

// Activations cached by Mlp::forward. Only valid for the network (and the
// parameter version) that produced it.
struct GradientTape {
  std::uint64_t net_id = 0;
  std::uint64_t net_version = 0;
  // layer_inputs[l] is the input of layer l (columns are samples).
  std::vector<Eigen::MatrixXd> layer_inputs;
  // Pre-activations of every layer; hidden ones drive the ReLU mask.
  std::vector<Eigen::MatrixXd> pre_activations;

  Eigen::Index batch_size() const {
    return layer_inputs.empty() ? 0 : layer_inputs.front().cols();
  }
};

struct ForwardResult {
  Eigen::MatrixXd output;  // output_dim x batch
  GradientTape tape;
};

// Gradient of sum(output_grad .* output) w.r.t. the flat parameter vector
// and the network input.
struct MlpGradients {
  Eigen::VectorXd params;  // empty when parameter gradients were skipped
  Eigen::MatrixXd input;   // input_dim x batch
};

// Dense ReLU perceptron. Parameters live in one flat vector, layer by layer:
// row-major weights (out x in) followed by the bias.
class Mlp {
 public:
  Mlp() = default;
  // All parameters start at zero.
  explicit Mlp(std::vector<int> layer_dims);
  Mlp(const Mlp& other);
  Mlp& operator=(const Mlp& other);
  Mlp(Mlp&&) noexcept = default;
  Mlp& operator=(Mlp&&) noexcept = default;

  // Weights uniform in +-1/sqrt(fan_in), biases zero.
  void init_uniform(std::mt19937_64& rng);

  const std::vector<int>& layer_dims() const { return dims_; }
  int num_layers() const { return static_cast<int>(dims_.size()) - 1; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  Eigen::Index num_params() const { return params_.size(); }

  const Eigen::VectorXd& params() const { return params_; }
  // Any mutable access invalidates outstanding tapes.
  Eigen::VectorXd& mutable_params();
  void set_params(const Eigen::VectorXd& params);

  ConstWeightMap weight(int layer) const;
  ConstBiasMap bias(int layer) const;
  WeightMap mutable_weight(int layer);
  BiasMap mutable_bias(int layer);

  // Columns of `input` are independent samples.
  ForwardResult forward(const Eigen::MatrixXd& input) const;
  Eigen::MatrixXd predict(const Eigen::MatrixXd& input) const;
  Eigen::VectorXd predict_one(const Eigen::VectorXd& input) const;

  MlpGradients backward(const GradientTape& tape, const Eigen::MatrixXd& output_grad,
                        bool param_grads = true) const;

  bool all_finite() const { return params_.allFinite(); }
  std::uint64_t id() const { return id_; }
  std::uint64_t version() const { return version_; }

 private:
  Eigen::Index weight_offset(int layer) const { return offsets_[layer]; }
  Eigen::Index bias_offset(int layer) const {
    return offsets_[layer] + static_cast<Eigen::Index>(dims_[layer + 1]) * dims_[layer];
  }
  void check_layer(int layer) const;
  static std::uint64_t next_id();

  std::vector<int> dims_;
  std::vector<Eigen::Index> offsets_;
  Eigen::VectorXd params_;
  std::uint64_t id_ = 0;
  std::uint64_t version_ = 0;
};

}  // namespace sacher
