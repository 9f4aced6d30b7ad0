#include "sacher/train.hpp"

#include <chrono>
#include <stdexcept>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace sacher {

void TrainConfig::validate() const {
  const LearnerConfig& l = learner;
  if (l.hidden.empty()) throw std::invalid_argument("at least one hidden layer is required");
  for (int h : l.hidden) {
    if (h <= 0) throw std::invalid_argument("hidden layer widths must be positive");
  }
  if (!(l.gamma >= 0.0 && l.gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(l.polyak > 0.0 && l.polyak <= 1.0)) throw std::invalid_argument("polyak must lie in (0, 1]");
  if (!(l.lr_critic > 0.0 && l.lr_actor > 0.0 && l.lr_alpha > 0.0)) {
    throw std::invalid_argument("learning rates must be positive");
  }
  if (!(l.initial_alpha > 0.0)) throw std::invalid_argument("initial alpha must be positive");
  if (!(l.action_scale > 0.0)) throw std::invalid_argument("action scale must be positive");
  if (!(l.log_std_min < l.log_std_max)) throw std::invalid_argument("log_std bounds are inverted");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (buffer_capacity < batch_size) throw std::invalid_argument("buffer capacity is below the batch size");
  if (her_goals < 0) throw std::invalid_argument("her goal count must be non-negative");
  if (episodes < 0) throw std::invalid_argument("episode count must be non-negative");
  if (warmup_steps < 0) throw std::invalid_argument("warmup steps must be non-negative");
  if (gradient_steps_per_env_step < 0) throw std::invalid_argument("gradient steps must be non-negative");
  if (eval_interval < 0) throw std::invalid_argument("eval interval must be non-negative");
}

namespace {

// The 256-wide layers allocate ~0.5 MB temporaries on every pass. glibc serves
// those with mmap/munmap by default, which costs a third of an update.
void keep_large_blocks_on_heap() {
#if defined(__GLIBC__)
  static const bool done = [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
    return true;
  }();
  (void)done;
#endif
}

}  // namespace

TrainResult train(const EnvSpec& env, const TrainConfig& config, const EpisodeCallback& on_episode) {
  keep_large_blocks_on_heap();
  config.validate();
  env.validate();
  const auto started = std::chrono::steady_clock::now();

  std::mt19937_64 rng(config.seed);
  TrainResult result{SacLearner(config.learner, rng),
                     ReplayBuffer(config.buffer_capacity, env.params.torque_bound), {}, 0};
  SacLearner& learner = result.learner;
  ReplayBuffer& buffer = result.buffer;
  const RelabelFn relabel = make_relabel_fn(env);
  const int m = config.effective_her_goals();
  const double bound = env.params.torque_bound;

  std::uint64_t env_steps = 0;
  for (int episode = 1; episode <= config.episodes; ++episode) {
    std::uint64_t step_in_run = env_steps;
    std::uniform_real_distribution<double> uniform(-bound, bound);
    const ActionFn act = [&](const UavState& s, const Goal& g) {
      const bool warming_up = step_in_run++ < static_cast<std::uint64_t>(config.warmup_steps);
      return warming_up ? uniform(rng) : learner.policy().sample(s, g, rng).action;
    };
    const Rollout episode_rollout = rollout(act, env);
    store_with_hindsight(buffer, episode_rollout.trace, env.goal, m, relabel, rng);
    env_steps += static_cast<std::uint64_t>(episode_rollout.steps());

    if (env_steps >= static_cast<std::uint64_t>(config.warmup_steps) &&
        buffer.size() >= config.batch_size) {
      const int updates = episode_rollout.steps() * config.gradient_steps_per_env_step;
      for (int k = 0; k < updates; ++k) {
        const std::vector<Transition> batch = buffer.sample_minibatch(config.batch_size, rng);
        learner.update(batch, rng);
      }
    }

    EpisodeRecord rec;
    rec.episode = episode;
    rec.cum_reward = episode_rollout.cumulative_reward;
    rec.success = episode_rollout.landed;
    rec.steps = episode_rollout.steps();
    rec.alpha = learner.temperature().alpha();
    rec.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.log.push_back(rec);
    if (on_episode) on_episode(rec, learner);
  }
  result.env_steps = env_steps;
  return result;
}

}  // namespace sacher
