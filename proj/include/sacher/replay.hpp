#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "sacher/types.hpp"

namespace sacher {

struct Transition {
  UavState state;
  double action = 0.0;  // yaw torque
  double reward = 0.0;
  UavState next_state;
  Goal goal;
  bool done = false;

  bool is_finite() const;
};

struct TraceStep {
  UavState state;
  double action = 0.0;
  UavState next_state;
};

// Visited states s_0 ... s_T and the actions between them. Consecutive steps
// share their boundary state by construction.
class EpisodeTrace {
 public:
  EpisodeTrace() = default;
  explicit EpisodeTrace(const UavState& initial) : states_{initial} {}
  // Throws ContractViolation if steps do not chain.
  static EpisodeTrace from_steps(std::span<const TraceStep> steps);

  void append(double action, const UavState& next_state);

  // Number of transitions T.
  std::size_t size() const { return actions_.size(); }
  bool empty() const { return states_.empty(); }
  TraceStep step(std::size_t t) const;
  const std::vector<UavState>& states() const { return states_; }
  const std::vector<double>& actions() const { return actions_; }

 private:
  std::vector<UavState> states_;
  std::vector<double> actions_;
};

// Fixed-capacity FIFO ring of transitions.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity, double action_bound = 0.5);

  // Rejects non-finite fields and out-of-bound actions with std::invalid_argument.
  void store(const Transition& t);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return size_ == 0; }
  // Logical index: 0 is the oldest surviving transition.
  const Transition& at(std::size_t i) const;

  // Uniform with replacement; throws ContractViolation if size() < batch_size.
  std::vector<std::size_t> sample_indices(std::size_t batch_size, std::mt19937_64& rng) const;
  std::vector<Transition> sample_minibatch(std::size_t batch_size, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  double action_bound_;
  std::vector<Transition> storage_;
  std::size_t size_ = 0;
  std::size_t write_cursor_ = 0;
};

// m goals, each the (x, y) of a visited state drawn uniformly with replacement.
std::vector<Goal> sample_additional_goals(const EpisodeTrace& trace, int m, std::mt19937_64& rng);

struct RelabelOutcome {
  double reward = 0.0;
  bool done = false;
};
// Reward and termination of the transition (state, action) -> next_state
// judged against `goal`.
using RelabelFn = std::function<RelabelOutcome(const UavState& state, double action,
                                               const UavState& next_state, const Goal& goal)>;

// For every step: the transition under `original_goal`, then one copy per
// entry of `hindsight_goals`. Stores size() * (1 + hindsight_goals.size()).
void relabel_and_store(ReplayBuffer& buf, const EpisodeTrace& trace, const Goal& original_goal,
                       std::span<const Goal> hindsight_goals, const RelabelFn& reward_fn);

// Same bookkeeping, but a fresh set of m goals is drawn for every step.
// m == 0 stores the original transitions only.
void store_with_hindsight(ReplayBuffer& buf, const EpisodeTrace& trace, const Goal& original_goal,
                          int m, const RelabelFn& reward_fn, std::mt19937_64& rng);

}  // namespace sacher
