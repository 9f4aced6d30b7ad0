#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "sacher/env_uav.hpp"
#include "sacher/learner.hpp"

namespace sacher {

struct TrainConfig {
  LearnerConfig learner;
  std::size_t batch_size = 256;
  std::size_t buffer_capacity = 1'000'000;
  bool use_her = true;
  int her_goals = 4;
  int episodes = 2000;
  int warmup_steps = 1000;
  int gradient_steps_per_env_step = 1;
  // Episodes between periodic checkpoints / evaluations; 0 disables them.
  int eval_interval = 100;
  std::uint64_t seed = 1;

  // Throws std::invalid_argument on out-of-range values.
  void validate() const;
  // Goals relabeled per step: her_goals with HER on, otherwise 0.
  int effective_her_goals() const { return use_her ? her_goals : 0; }
};

struct EpisodeRecord {
  int episode = 0;  // 1-based
  double cum_reward = 0.0;
  bool success = false;
  int steps = 0;
  double alpha = 0.0;
  double wallclock_s = 0.0;  // since the start of training
};

// Called after every episode's storage and gradient phase.
using EpisodeCallback = std::function<void(const EpisodeRecord&, const SacLearner&)>;

struct TrainResult {
  SacLearner learner;
  ReplayBuffer buffer;
  std::vector<EpisodeRecord> log;
  std::uint64_t env_steps = 0;
};

// Runs the full episode loop: stochastic rollout, storage with hindsight
// relabeling, then one batch of gradient steps per episode.
TrainResult train(const EnvSpec& env, const TrainConfig& config, const EpisodeCallback& on_episode = {});

}  // namespace sacher
