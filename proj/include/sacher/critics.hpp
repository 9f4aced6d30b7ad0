#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "sacher/mlp.hpp"

namespace sacher {

// Two live soft Q-networks over [state; goal; action] plus their targets.
struct TwinCritics {
  Mlp q1;
  Mlp q2;
  Mlp target_q1;
  Mlp target_q2;
  double polyak = 0.005;

  TwinCritics() = default;
  // Live networks get independent uniform inits; targets start as copies.
  TwinCritics(const std::vector<int>& hidden, double polyak_coef, std::mt19937_64& rng);
};

// target <- polyak * live + (1 - polyak) * target, for both critics.
void polyak_update(TwinCritics& critics);
void polyak_update(const Mlp& live, Mlp& target, double polyak);

// Entropy temperature, kept positive by learning its logarithm.
struct Temperature {
  double log_alpha = 0.0;
  double target_entropy = -1.0;

  double alpha() const { return std::exp(log_alpha); }
};

}  // namespace sacher
