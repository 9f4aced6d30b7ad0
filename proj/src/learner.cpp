#include "sacher/learner.hpp"

#include <cmath>
#include <sstream>

#include "sacher/errors.hpp"

namespace sacher {

Batch make_batch(std::span<const Transition> transitions) {
  const auto n = static_cast<Eigen::Index>(transitions.size());
  if (n == 0) throw ContractViolation("make_batch: empty minibatch");
  Batch b;
  b.obs.resize(kPolicyInputDim, n);
  b.next_obs.resize(kPolicyInputDim, n);
  b.actions.resize(n);
  b.rewards.resize(n);
  b.dones.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = transitions[static_cast<std::size_t>(i)];
    write_policy_input(t.state, t.goal, b.obs.col(i));
    write_policy_input(t.next_state, t.goal, b.next_obs.col(i));
    b.actions(i) = t.action;
    b.rewards(i) = t.reward;
    b.dones(i) = t.done ? 1.0 : 0.0;
  }
  return b;
}

Eigen::MatrixXd critic_inputs(const Eigen::MatrixXd& obs, const Eigen::VectorXd& actions) {
  if (obs.rows() != kPolicyInputDim || obs.cols() != actions.size()) {
    throw ContractViolation("critic_inputs: observation and action counts differ");
  }
  Eigen::MatrixXd in(kCriticInputDim, obs.cols());
  in.topRows(kPolicyInputDim) = obs;
  in.row(kPolicyInputDim) = actions.transpose();
  return in;
}

UpdateNoise UpdateNoise::draw(Eigen::Index batch_size, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  UpdateNoise n;
  n.next_action.resize(batch_size);
  n.actor.resize(batch_size);
  for (Eigen::Index i = 0; i < batch_size; ++i) n.next_action(i) = normal(rng);
  for (Eigen::Index i = 0; i < batch_size; ++i) n.actor(i) = normal(rng);
  return n;
}

Eigen::VectorXd soft_values(const TwinCritics& critics, const GaussianPolicy& policy,
                            const Temperature& temp, const Eigen::MatrixXd& next_obs,
                            const Eigen::VectorXd& noise) {
  const PolicyBatch next = policy.sample_batch(next_obs, noise);
  const Eigen::MatrixXd in = critic_inputs(next_obs, next.actions);
  const Eigen::VectorXd t1 = critics.target_q1.predict(in).row(0).transpose();
  const Eigen::VectorXd t2 = critics.target_q2.predict(in).row(0).transpose();
  return t1.cwiseMin(t2) - temp.alpha() * next.log_probs;
}

double soft_value(const TwinCritics& critics, const GaussianPolicy& policy, const Temperature& temp,
                  const UavState& next_state, const Goal& goal, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd noise(1);
  noise(0) = normal(rng);
  return soft_values(critics, policy, temp, policy_input(next_state, goal), noise)(0);
}

CriticLoss critic_loss(const TwinCritics& critics, const GaussianPolicy& policy,
                       const Temperature& temp, const Batch& batch, double gamma,
                       const Eigen::VectorXd& next_action_noise) {
  const Eigen::Index n = batch.size();
  if (n == 0) throw ContractViolation("critic_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);

  CriticLoss out;
  const Eigen::VectorXd v_next = soft_values(critics, policy, temp, batch.next_obs, next_action_noise);
  out.targets = batch.rewards.array() + gamma * (1.0 - batch.dones.array()) * v_next.array();

  const Eigen::MatrixXd in = critic_inputs(batch.obs, batch.actions);
  auto one_critic = [&](const Mlp& q, double& loss, Eigen::VectorXd& grad) {
    ForwardResult f = q.forward(in);
    const Eigen::RowVectorXd residual = f.output.row(0) - out.targets.transpose();
    loss = 0.5 * residual.squaredNorm() * inv_n;
    grad = q.backward(f.tape, residual * inv_n).params;
  };
  one_critic(critics.q1, out.loss_q1, out.grad_q1);
  one_critic(critics.q2, out.loss_q2, out.grad_q2);
  out.loss = out.loss_q1 + out.loss_q2;
  return out;
}

ActorLoss actor_loss(const TwinCritics& critics, const GaussianPolicy& policy,
                     const Temperature& temp, const Batch& batch, const Eigen::VectorXd& noise) {
  const Eigen::Index n = batch.size();
  if (n == 0) throw ContractViolation("actor_loss: empty batch");
  const double inv_n = 1.0 / static_cast<double>(n);
  const double alpha = temp.alpha();

  const PolicyBatch pb = policy.sample_batch(batch.obs, noise);
  const Eigen::MatrixXd in = critic_inputs(batch.obs, pb.actions);
  const ForwardResult f1 = critics.q1.forward(in);
  const ForwardResult f2 = critics.q2.forward(in);
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, n);
  const Eigen::MatrixXd dq1 = critics.q1.backward(f1.tape, ones, false).input;
  const Eigen::MatrixXd dq2 = critics.q2.backward(f2.tape, ones, false).input;

  ActorLoss out;
  Eigen::VectorXd d_action(n);
  const Eigen::VectorXd d_log_prob = Eigen::VectorXd::Constant(n, alpha * inv_n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool first = f1.output(0, i) <= f2.output(0, i);
    const double q_min = first ? f1.output(0, i) : f2.output(0, i);
    const double dq_da = first ? dq1(kPolicyInputDim, i) : dq2(kPolicyInputDim, i);
    total += alpha * pb.log_probs(i) - q_min;
    d_action(i) = -dq_da * inv_n;
  }
  out.loss = total * inv_n;
  out.grad = policy.backward(pb, d_action, d_log_prob);
  out.log_probs = pb.log_probs;
  return out;
}

TemperatureLoss temperature_loss(const Temperature& temp, const Eigen::VectorXd& log_probs) {
  if (log_probs.size() == 0) throw ContractViolation("temperature_loss: no log-probabilities");
  const double alpha = temp.alpha();
  const double mean_term = (log_probs.array() + temp.target_entropy).mean();
  // d/d(log_alpha) of -alpha * m is -alpha * m.
  return {-alpha * mean_term, -alpha * mean_term};
}

SacLearner::SacLearner(const LearnerConfig& config, std::mt19937_64& rng) : config_(config) {
  PolicyConfig pc;
  pc.hidden = config.hidden;
  pc.action_scale = config.action_scale;
  pc.log_std_min = config.log_std_min;
  pc.log_std_max = config.log_std_max;
  critics_ = TwinCritics(config.hidden, config.polyak, rng);
  policy_ = GaussianPolicy(pc, rng);
  temperature_.log_alpha = std::log(config.initial_alpha);
  temperature_.target_entropy = config.target_entropy;
  reset_optimizers();
}

void SacLearner::reset_optimizers() {
  const auto adam = [&](double lr) {
    return AdamConfig{lr, config_.adam_beta1, config_.adam_beta2, config_.adam_epsilon};
  };
  adam_q1_ = AdamState(critics_.q1.num_params(), adam(config_.lr_critic));
  adam_q2_ = AdamState(critics_.q2.num_params(), adam(config_.lr_critic));
  adam_policy_ = AdamState(policy_.net().num_params(), adam(config_.lr_actor));
  adam_alpha_ = AdamState(1, adam(config_.lr_alpha));
}

UpdateStats SacLearner::update(const Batch& batch, const UpdateNoise& noise) {
  UpdateStats stats;

  const CriticLoss cl =
      critic_loss(critics_, policy_, temperature_, batch, config_.gamma, noise.next_action);
  if (!std::isfinite(cl.loss) || !cl.grad_q1.allFinite() || !cl.grad_q2.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite critic loss at update " << updates_ << " (loss " << cl.loss << ", alpha "
        << temperature_.alpha() << ", max |target| " << cl.targets.cwiseAbs().maxCoeff() << ")";
    throw NumericalFault(msg.str());
  }
  adam_step(critics_.q1.mutable_params(), cl.grad_q1, adam_q1_);
  adam_step(critics_.q2.mutable_params(), cl.grad_q2, adam_q2_);

  const ActorLoss al = actor_loss(critics_, policy_, temperature_, batch, noise.actor);
  if (!std::isfinite(al.loss) || !al.grad.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite actor loss at update " << updates_ << " (loss " << al.loss << ", alpha "
        << temperature_.alpha() << ")";
    throw NumericalFault(msg.str());
  }
  adam_step(policy_.net().mutable_params(), al.grad, adam_policy_);

  const TemperatureLoss tl = temperature_loss(temperature_, al.log_probs);
  adam_step(temperature_.log_alpha, tl.grad, adam_alpha_);

  polyak_update(critics_);
  ++updates_;

  stats.critic_loss = cl.loss;
  stats.actor_loss = al.loss;
  stats.temperature_loss = tl.loss;
  stats.alpha = temperature_.alpha();
  stats.mean_log_prob = al.log_probs.mean();
  return stats;
}

UpdateStats SacLearner::update(std::span<const Transition> transitions, std::mt19937_64& rng) {
  const Batch batch = make_batch(transitions);
  const UpdateNoise noise = UpdateNoise::draw(batch.size(), rng);
  return update(batch, noise);
}

Checkpoint SacLearner::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.scalars["log_alpha"] = temperature_.log_alpha;
  ckpt.scalars["target_entropy"] = temperature_.target_entropy;
  ckpt.scalars["polyak"] = critics_.polyak;
  ckpt.scalars["action_scale"] = policy_.config().action_scale;
  ckpt.scalars["log_std_min"] = policy_.config().log_std_min;
  ckpt.scalars["log_std_max"] = policy_.config().log_std_max;
  ckpt.networks.emplace_back("policy", policy_.net());
  ckpt.networks.emplace_back("q1", critics_.q1);
  ckpt.networks.emplace_back("q2", critics_.q2);
  ckpt.networks.emplace_back("target_q1", critics_.target_q1);
  ckpt.networks.emplace_back("target_q2", critics_.target_q2);
  return ckpt;
}

GaussianPolicy policy_from_checkpoint(const Checkpoint& ckpt) {
  PolicyConfig pc;
  pc.action_scale = ckpt.scalar("action_scale");
  pc.log_std_min = ckpt.scalar("log_std_min");
  pc.log_std_max = ckpt.scalar("log_std_max");
  const Mlp& net = ckpt.network("policy");
  const auto& dims = net.layer_dims();
  pc.hidden.assign(dims.begin() + 1, dims.end() - 1);
  return GaussianPolicy(net, pc);
}

SacLearner SacLearner::from_checkpoint(const Checkpoint& ckpt, const LearnerConfig& config) {
  SacLearner l;
  l.config_ = config;
  l.policy_ = policy_from_checkpoint(ckpt);
  l.critics_.q1 = ckpt.network("q1");
  l.critics_.q2 = ckpt.network("q2");
  l.critics_.target_q1 = ckpt.network("target_q1");
  l.critics_.target_q2 = ckpt.network("target_q2");
  l.critics_.polyak = ckpt.scalar("polyak");
  l.temperature_.log_alpha = ckpt.scalar("log_alpha");
  l.temperature_.target_entropy = ckpt.scalar("target_entropy");
  l.config_.hidden = l.policy_.config().hidden;
  l.reset_optimizers();
  return l;
}

}  // namespace sacher
