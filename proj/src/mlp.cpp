#include "sacher/mlp.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "sacher/errors.hpp"

namespace sacher {

std::uint64_t Mlp::next_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

Mlp::Mlp(std::vector<int> layer_dims) : dims_(std::move(layer_dims)), id_(next_id()) {
  if (dims_.size() < 2) {
    throw ContractViolation("Mlp needs at least an input and an output dimension");
  }
  Eigen::Index total = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (dims_[l] <= 0 || dims_[l + 1] <= 0) {
      throw ContractViolation("Mlp layer dimensions must be positive");
    }
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(dims_[l + 1]) * (dims_[l] + 1);
  }
  params_ = Eigen::VectorXd::Zero(total);
}

Mlp::Mlp(const Mlp& other)
    : dims_(other.dims_), offsets_(other.offsets_), params_(other.params_), id_(next_id()) {}

Mlp& Mlp::operator=(const Mlp& other) {
  if (this != &other) {
    dims_ = other.dims_;
    offsets_ = other.offsets_;
    params_ = other.params_;
    if (id_ == 0) id_ = next_id();
    ++version_;
  }
  return *this;
}

void Mlp::init_uniform(std::mt19937_64& rng) {
  for (int l = 0; l < num_layers(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(dims_[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    auto w = mutable_weight(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    }
    mutable_bias(l).setZero();
  }
}

Eigen::VectorXd& Mlp::mutable_params() {
  ++version_;
  return params_;
}

void Mlp::set_params(const Eigen::VectorXd& params) {
  if (params.size() != params_.size()) {
    throw ContractViolation("Mlp::set_params: expected " + std::to_string(params_.size()) +
                            " values, got " + std::to_string(params.size()));
  }
  params_ = params;
  ++version_;
}

void Mlp::check_layer(int layer) const {
  if (layer < 0 || layer >= num_layers()) {
    throw ContractViolation("Mlp: layer index " + std::to_string(layer) + " out of range");
  }
}

ConstWeightMap Mlp::weight(int layer) const {
  check_layer(layer);
  return ConstWeightMap(params_.data() + weight_offset(layer), dims_[layer + 1], dims_[layer]);
}

ConstBiasMap Mlp::bias(int layer) const {
  check_layer(layer);
  return ConstBiasMap(params_.data() + bias_offset(layer), dims_[layer + 1]);
}

WeightMap Mlp::mutable_weight(int layer) {
  check_layer(layer);
  ++version_;
  return WeightMap(params_.data() + weight_offset(layer), dims_[layer + 1], dims_[layer]);
}

BiasMap Mlp::mutable_bias(int layer) {
  check_layer(layer);
  ++version_;
  return BiasMap(params_.data() + bias_offset(layer), dims_[layer + 1]);
}

ForwardResult Mlp::forward(const Eigen::MatrixXd& input) const {
  if (dims_.empty()) throw ContractViolation("Mlp::forward on an empty network");
  if (input.rows() != dims_.front()) {
    throw ContractViolation("Mlp::forward: input has " + std::to_string(input.rows()) +
                            " rows, network expects " + std::to_string(dims_.front()));
  }
  ForwardResult result;
  GradientTape& tape = result.tape;
  tape.net_id = id_;
  tape.net_version = version_;
  tape.layer_inputs.reserve(num_layers());
  tape.pre_activations.reserve(num_layers());

  Eigen::MatrixXd activation = input;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * activation;
    z.colwise() += bias(l);
    tape.layer_inputs.push_back(std::move(activation));
    if (l + 1 < num_layers()) {
      activation = z.cwiseMax(0.0);
    } else {
      activation = z;
    }
    tape.pre_activations.push_back(std::move(z));
  }
  result.output = std::move(activation);
  return result;
}

Eigen::MatrixXd Mlp::predict(const Eigen::MatrixXd& input) const {
  if (input.rows() != dims_.front()) {
    throw ContractViolation("Mlp::predict: input has " + std::to_string(input.rows()) +
                            " rows, network expects " + std::to_string(dims_.front()));
  }
  Eigen::MatrixXd activation = input;
  for (int l = 0; l < num_layers(); ++l) {
    Eigen::MatrixXd z = weight(l) * activation;
    z.colwise() += bias(l);
    activation = (l + 1 < num_layers()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
  }
  return activation;
}

Eigen::VectorXd Mlp::predict_one(const Eigen::VectorXd& input) const {
  return predict(input);
}

MlpGradients Mlp::backward(const GradientTape& tape, const Eigen::MatrixXd& output_grad,
                           bool param_grads) const {
  if (tape.net_id != id_ || tape.net_version != version_) {
    throw ContractViolation("Mlp::backward: tape was not produced by this network's current parameters");
  }
  if (static_cast<int>(tape.layer_inputs.size()) != num_layers()) {
    throw ContractViolation("Mlp::backward: tape has the wrong number of layers");
  }
  if (output_grad.rows() != dims_.back() || output_grad.cols() != tape.batch_size()) {
    throw ContractViolation("Mlp::backward: output gradient shape does not match the forward output");
  }

  MlpGradients grads;
  if (param_grads) grads.params = Eigen::VectorXd::Zero(params_.size());

  Eigen::MatrixXd delta = output_grad;
  for (int l = num_layers() - 1; l >= 0; --l) {
    if (param_grads) {
      WeightMap dw(grads.params.data() + weight_offset(l), dims_[l + 1], dims_[l]);
      dw.noalias() = delta * tape.layer_inputs[l].transpose();
      BiasMap(grads.params.data() + bias_offset(l), dims_[l + 1]) = delta.rowwise().sum();
    }
    Eigen::MatrixXd upstream = weight(l).transpose() * delta;
    if (l > 0) {
      // ReLU subgradient: zero at and below zero pre-activation.
      upstream = upstream.cwiseProduct(
          (tape.pre_activations[l - 1].array() > 0.0).cast<double>().matrix());
    }
    delta = std::move(upstream);
  }
  grads.input = std::move(delta);
  return grads;
}

}  // namespace sacher
