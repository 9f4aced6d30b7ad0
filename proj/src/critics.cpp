#include "sacher/critics.hpp"

#include "sacher/errors.hpp"
#include "sacher/types.hpp"

namespace sacher {

TwinCritics::TwinCritics(const std::vector<int>& hidden, double polyak_coef, std::mt19937_64& rng)
    : polyak(polyak_coef) {
  std::vector<int> dims{kCriticInputDim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  q1 = Mlp(dims);
  q2 = Mlp(dims);
  q1.init_uniform(rng);
  q2.init_uniform(rng);
  target_q1 = q1;
  target_q2 = q2;
}

void polyak_update(const Mlp& live, Mlp& target, double polyak) {
  if (live.layer_dims() != target.layer_dims()) {
    throw ContractViolation("polyak_update: live and target architectures differ");
  }
  Eigen::VectorXd& t = target.mutable_params();
  t = polyak * live.params() + (1.0 - polyak) * t;
}

void polyak_update(TwinCritics& critics) {
  polyak_update(critics.q1, critics.target_q1, critics.polyak);
  polyak_update(critics.q2, critics.target_q2, critics.polyak);
}

}  // namespace sacher
