#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sacher/adam.hpp"
#include "sacher/checkpoint.hpp"
#include "sacher/critics.hpp"
#include "sacher/policy.hpp"
#include "sacher/replay.hpp"

namespace sacher {

// A minibatch laid out column-wise for the networks.
struct Batch {
  Eigen::MatrixXd obs;       // [s; g], kPolicyInputDim x B
  Eigen::MatrixXd next_obs;  // [s'; g]
  Eigen::VectorXd actions;
  Eigen::VectorXd rewards;
  Eigen::VectorXd dones;  // 1.0 for terminal transitions

  Eigen::Index size() const { return actions.size(); }
};

Batch make_batch(std::span<const Transition> transitions);

// [obs; actions] stacked into critic inputs.
Eigen::MatrixXd critic_inputs(const Eigen::MatrixXd& obs, const Eigen::VectorXd& actions);

// Standard normal draws consumed by one gradient step.
struct UpdateNoise {
  Eigen::VectorXd next_action;  // for the bootstrap action a' ~ pi(.|s', g)
  Eigen::VectorXd actor;        // for the reparameterized actor sample

  static UpdateNoise draw(Eigen::Index batch_size, std::mt19937_64& rng);
};

// min(target_q1, target_q2)(s', g, a') - alpha log pi(a'|s', g) for a single
// fresh draw of a'.
double soft_value(const TwinCritics& critics, const GaussianPolicy& policy, const Temperature& temp,
                  const UavState& next_state, const Goal& goal, std::mt19937_64& rng);
Eigen::VectorXd soft_values(const TwinCritics& critics, const GaussianPolicy& policy,
                            const Temperature& temp, const Eigen::MatrixXd& next_obs,
                            const Eigen::VectorXd& noise);

struct CriticLoss {
  double loss = 0.0;  // loss_q1 + loss_q2
  double loss_q1 = 0.0;
  double loss_q2 = 0.0;
  Eigen::VectorXd grad_q1;
  Eigen::VectorXd grad_q2;
  Eigen::VectorXd targets;  // bootstrap targets y, treated as constants
};

// Mean of 1/2 (Q_i(s, g, a) - y)^2 with y = r + gamma (1 - done) V(s', g).
CriticLoss critic_loss(const TwinCritics& critics, const GaussianPolicy& policy,
                       const Temperature& temp, const Batch& batch, double gamma,
                       const Eigen::VectorXd& next_action_noise);

struct ActorLoss {
  double loss = 0.0;
  Eigen::VectorXd grad;
  Eigen::VectorXd log_probs;
};

// Mean of alpha log pi(a~|s, g) - min(Q1, Q2)(s, g, a~); critics are held fixed.
ActorLoss actor_loss(const TwinCritics& critics, const GaussianPolicy& policy,
                     const Temperature& temp, const Batch& batch, const Eigen::VectorXd& noise);

struct TemperatureLoss {
  double loss = 0.0;
  double grad = 0.0;  // w.r.t. log_alpha
};

// Mean of -alpha (log_prob + target_entropy); log-probs are constants.
TemperatureLoss temperature_loss(const Temperature& temp, const Eigen::VectorXd& log_probs);

struct LearnerConfig {
  std::vector<int> hidden{256, 256};
  double gamma = 0.99;
  double polyak = 0.005;
  double lr_critic = 3e-4;
  double lr_actor = 3e-4;
  double lr_alpha = 3e-4;
  double target_entropy = -1.0;
  double initial_alpha = 1.0;
  double action_scale = 0.5;
  double log_std_min = -20.0;
  double log_std_max = 2.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
};

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  double temperature_loss = 0.0;
  double alpha = 0.0;
  double mean_log_prob = 0.0;
};

// Networks, temperature and optimizer state of one SACHER learner.
class SacLearner {
 public:
  SacLearner(const LearnerConfig& config, std::mt19937_64& rng);

  // One gradient step: critics, then actor, then temperature, then targets.
  UpdateStats update(const Batch& batch, const UpdateNoise& noise);
  UpdateStats update(std::span<const Transition> batch, std::mt19937_64& rng);

  const LearnerConfig& config() const { return config_; }
  const GaussianPolicy& policy() const { return policy_; }
  GaussianPolicy& policy() { return policy_; }
  const TwinCritics& critics() const { return critics_; }
  TwinCritics& critics() { return critics_; }
  const Temperature& temperature() const { return temperature_; }
  Temperature& temperature() { return temperature_; }
  std::uint64_t updates() const { return updates_; }

  Checkpoint to_checkpoint() const;
  // Restores networks and temperature; optimizer moments restart from zero.
  static SacLearner from_checkpoint(const Checkpoint& ckpt, const LearnerConfig& config);

 private:
  SacLearner() = default;
  void reset_optimizers();

  LearnerConfig config_;
  GaussianPolicy policy_;
  TwinCritics critics_;
  Temperature temperature_;
  AdamState adam_q1_;
  AdamState adam_q2_;
  AdamState adam_policy_;
  AdamState adam_alpha_;
  std::uint64_t updates_ = 0;
};

// Loads just the policy from a learner checkpoint.
GaussianPolicy policy_from_checkpoint(const Checkpoint& ckpt);

}  // namespace sacher
