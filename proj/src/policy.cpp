#include "sacher/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sacher/errors.hpp"

namespace sacher {

namespace {

std::vector<int> policy_dims(const std::vector<int>& hidden) {
  std::vector<int> dims{kPolicyInputDim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(2);
  return dims;
}

// tanh rounds to +-1 beyond |u| ~ 19; keep emitted actions inside the open interval.
double strict_squash(double t) {
  return std::abs(t) < 1.0 ? t : std::copysign(std::nextafter(1.0, 0.0), t);
}

}  // namespace

void write_policy_input(const UavState& s, const Goal& g, Eigen::Ref<Eigen::VectorXd> out) {
  out << s.x, s.y, s.z, s.psi, s.psi_dot, g.x, g.y;
}

Eigen::VectorXd policy_input(const UavState& s, const Goal& g) {
  Eigen::VectorXd v(kPolicyInputDim);
  write_policy_input(s, g, v);
  return v;
}

double log_one_minus_tanh_sq(double u) {
  // 1 - tanh(u)^2 = 4 / (e^u + e^-u)^2
  const double a = std::abs(u);
  return 2.0 * (std::numbers::ln2 - a - std::log1p(std::exp(-2.0 * a)));
}

GaussianPolicy::GaussianPolicy(const PolicyConfig& config, std::mt19937_64& rng)
    : net_(policy_dims(config.hidden)), config_(config) {
  net_.init_uniform(rng);
}

GaussianPolicy::GaussianPolicy(Mlp net, const PolicyConfig& config)
    : net_(std::move(net)), config_(config) {
  if (net_.input_dim() != kPolicyInputDim || net_.output_dim() != 2) {
    throw ContractViolation("GaussianPolicy: network must map 7 inputs to (mean, log_std)");
  }
}

PolicyBatch GaussianPolicy::sample_batch(const Eigen::MatrixXd& inputs,
                                         const Eigen::VectorXd& noise) const {
  if (noise.size() != inputs.cols()) {
    throw ContractViolation("GaussianPolicy::sample_batch: one noise draw per column required");
  }
  ForwardResult fwd = net_.forward(inputs);
  const Eigen::Index n = inputs.cols();
  PolicyBatch b;
  b.noise = noise;
  b.mean = fwd.output.row(0).transpose();
  b.log_std.resize(n);
  b.log_std_live.resize(n);
  b.pre_tanh.resize(n);
  b.actions.resize(n);
  b.log_probs.resize(n);

  const double scale = config_.action_scale;
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi) + std::log(scale);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double raw = fwd.output(1, i);
    if (!std::isfinite(raw) || !std::isfinite(b.mean(i))) {
      std::ostringstream msg;
      msg << "policy produced a non-finite output (mean " << b.mean(i) << ", log_std " << raw
          << ") for input [" << inputs.col(i).transpose() << "]";
      throw NumericalFault(msg.str());
    }
    const double ls = std::clamp(raw, config_.log_std_min, config_.log_std_max);
    b.log_std(i) = ls;
    b.log_std_live(i) = (raw > config_.log_std_min && raw < config_.log_std_max) ? 1.0 : 0.0;
    const double u = b.mean(i) + std::exp(ls) * noise(i);
    b.pre_tanh(i) = u;
    b.actions(i) = scale * strict_squash(std::tanh(u));
    b.log_probs(i) = -0.5 * noise(i) * noise(i) - ls - log_norm - log_one_minus_tanh_sq(u);
  }
  b.tape = std::move(fwd.tape);
  return b;
}

Eigen::VectorXd GaussianPolicy::backward(const PolicyBatch& b, const Eigen::VectorXd& d_action,
                                         const Eigen::VectorXd& d_log_prob) const {
  const Eigen::Index n = b.actions.size();
  if (d_action.size() != n || d_log_prob.size() != n) {
    throw ContractViolation("GaussianPolicy::backward: gradient sizes do not match the batch");
  }
  const double scale = config_.action_scale;
  Eigen::MatrixXd out_grad(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = std::tanh(b.pre_tanh(i));
    const double da_du = scale * std::exp(log_one_minus_tanh_sq(b.pre_tanh(i)));
    const double du_dls = std::exp(b.log_std(i)) * b.noise(i);
    // d log_prob / du through the squash correction is 2 tanh(u); the
    // Gaussian term contributes -1 w.r.t. log_std at fixed noise.
    const double d_u = d_action(i) * da_du + d_log_prob(i) * 2.0 * t;
    out_grad(0, i) = d_u;
    out_grad(1, i) = (d_u * du_dls - d_log_prob(i)) * b.log_std_live(i);
  }
  return net_.backward(b.tape, out_grad).params;
}

GaussianPolicy::Sample GaussianPolicy::sample(const UavState& s, const Goal& g,
                                              std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd noise(1);
  noise(0) = normal(rng);
  const PolicyBatch b = sample_batch(policy_input(s, g), noise);
  return {b.actions(0), b.log_probs(0)};
}

double GaussianPolicy::deterministic_action(const UavState& s, const Goal& g) const {
  const Eigen::VectorXd out = net_.predict_one(policy_input(s, g));
  if (!out.allFinite()) throw NumericalFault("policy produced a non-finite mean");
  return config_.action_scale * strict_squash(std::tanh(out(0)));
}

}  // namespace sacher
