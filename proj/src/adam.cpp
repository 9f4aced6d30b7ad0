#include "sacher/adam.hpp"

#include <cmath>
#include <string>

#include "sacher/errors.hpp"

namespace sacher {

void adam_step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::VectorXd& grads, AdamState& state) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ContractViolation("adam_step: parameter, gradient and moment sizes differ (" +
                            std::to_string(params.size()) + " params, " +
                            std::to_string(grads.size()) + " grads)");
  }
  const AdamConfig& c = state.config;
  ++state.step_count;
  state.first_moment = c.beta1 * state.first_moment + (1.0 - c.beta1) * grads;
  state.second_moment =
      c.beta2 * state.second_moment + (1.0 - c.beta2) * grads.cwiseProduct(grads);

  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  params.array() -= c.learning_rate * (state.first_moment.array() / correction1) /
                    ((state.second_moment.array() / correction2).sqrt() + c.epsilon);
}

void adam_step(double& param, double grad, AdamState& state) {
  if (state.first_moment.size() == 0 && state.step_count == 0) {
    state.first_moment = Eigen::VectorXd::Zero(1);
    state.second_moment = Eigen::VectorXd::Zero(1);
  }
  Eigen::VectorXd p(1);
  p(0) = param;
  Eigen::VectorXd g(1);
  g(0) = grad;
  adam_step(p, g, state);
  param = p(0);
}

}  // namespace sacher
