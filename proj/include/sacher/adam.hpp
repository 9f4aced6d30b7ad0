#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace sacher {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment accumulators for one flat parameter vector.
struct AdamState {
  AdamConfig config;
  std::uint64_t step_count = 0;
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;

  AdamState() = default;
  AdamState(Eigen::Index num_params, AdamConfig cfg)
      : config(cfg),
        first_moment(Eigen::VectorXd::Zero(num_params)),
        second_moment(Eigen::VectorXd::Zero(num_params)) {}
};

// Bias-corrected Adam update applied in place.
void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grads, AdamState& state);

// Scalar variant, used for the log-temperature.
void adam_step(double& param, double grad, AdamState& state);

}  // namespace sacher
