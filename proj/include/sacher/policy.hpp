#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "sacher/mlp.hpp"
#include "sacher/types.hpp"

namespace sacher {

// Column layout shared by every network: [x, y, z, psi, psi_dot, g_x, g_y].
void write_policy_input(const UavState& s, const Goal& g, Eigen::Ref<Eigen::VectorXd> out);
Eigen::VectorXd policy_input(const UavState& s, const Goal& g);

struct PolicyConfig {
  std::vector<int> hidden{256, 256};
  double action_scale = 0.5;
  double log_std_min = -20.0;
  double log_std_max = 2.0;
};

// Reparameterized draws for a batch, with the intermediates needed to push
// gradients back through the squashing.
struct PolicyBatch {
  Eigen::VectorXd actions;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;       // after clamping
  Eigen::VectorXd log_std_live;  // 1 where the clamp is inactive, else 0
  Eigen::VectorXd pre_tanh;
  Eigen::VectorXd noise;
  GradientTape tape;
};

// Tanh-squashed Gaussian over the yaw torque. The network maps the 7-wide
// policy input to (mean, log_std).
class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(const PolicyConfig& config, std::mt19937_64& rng);
  GaussianPolicy(Mlp net, const PolicyConfig& config);

  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const PolicyConfig& config() const { return config_; }
  double action_scale() const { return config_.action_scale; }

  struct Sample {
    double action = 0.0;
    double log_prob = 0.0;
  };
  Sample sample(const UavState& s, const Goal& g, std::mt19937_64& rng) const;
  // scale * tanh(mean); used for evaluation.
  double deterministic_action(const UavState& s, const Goal& g) const;

  // inputs: kPolicyInputDim x B; noise: B standard normal draws.
  PolicyBatch sample_batch(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& noise) const;

  // Parameter gradient of sum_b(d_action[b] * a_b + d_log_prob[b] * log_prob_b)
  // with the noise held fixed.
  Eigen::VectorXd backward(const PolicyBatch& batch, const Eigen::VectorXd& d_action,
                           const Eigen::VectorXd& d_log_prob) const;

 private:
  Mlp net_;
  PolicyConfig config_;
};

// log(1 - tanh(u)^2), stable for large |u|.
double log_one_minus_tanh_sq(double u);

}  // namespace sacher
