#include "sacher/replay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sacher/errors.hpp"

namespace sacher {

bool Transition::is_finite() const {
  return state.is_finite() && std::isfinite(action) && std::isfinite(reward) &&
         next_state.is_finite() && goal.is_finite();
}

EpisodeTrace EpisodeTrace::from_steps(std::span<const TraceStep> steps) {
  if (steps.empty()) return {};
  EpisodeTrace trace(steps.front().state);
  for (std::size_t t = 0; t < steps.size(); ++t) {
    if (!(steps[t].state == trace.states_.back())) {
      throw ContractViolation("EpisodeTrace: step " + std::to_string(t) +
                              " does not start where the previous one ended");
    }
    trace.append(steps[t].action, steps[t].next_state);
  }
  return trace;
}

void EpisodeTrace::append(double action, const UavState& next_state) {
  if (states_.empty()) throw ContractViolation("EpisodeTrace::append before an initial state");
  actions_.push_back(action);
  states_.push_back(next_state);
}

TraceStep EpisodeTrace::step(std::size_t t) const {
  if (t >= actions_.size()) throw ContractViolation("EpisodeTrace::step index out of range");
  return {states_[t], actions_[t], states_[t + 1]};
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, double action_bound)
    : capacity_(capacity), action_bound_(action_bound) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer capacity must be positive");
  // Grow lazily; a full 1e6 buffer is ~100 MB.
  storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::store(const Transition& t) {
  if (!t.is_finite()) throw std::invalid_argument("ReplayBuffer::store: transition has a non-finite field");
  if (std::abs(t.action) > action_bound_) {
    throw std::invalid_argument("ReplayBuffer::store: action " + std::to_string(t.action) +
                                " outside the torque bound");
  }
  if (storage_.size() < capacity_) {
    storage_.push_back(t);
  } else {
    storage_[write_cursor_] = t;
  }
  write_cursor_ = (write_cursor_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw ContractViolation("ReplayBuffer::at index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : write_cursor_;
  return storage_[(oldest + i) % capacity_];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size,
                                                      std::mt19937_64& rng) const {
  if (batch_size == 0 || size_ < batch_size) {
    throw ContractViolation("ReplayBuffer: cannot sample " + std::to_string(batch_size) +
                            " transitions from a buffer of " + std::to_string(size_));
  }
  std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

std::vector<Transition> ReplayBuffer::sample_minibatch(std::size_t batch_size,
                                                       std::mt19937_64& rng) const {
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (std::size_t i : sample_indices(batch_size, rng)) batch.push_back(at(i));
  return batch;
}

std::vector<Goal> sample_additional_goals(const EpisodeTrace& trace, int m, std::mt19937_64& rng) {
  if (trace.empty()) throw ContractViolation("sample_additional_goals: empty episode trace");
  if (m < 0) throw ContractViolation("sample_additional_goals: negative goal count");
  const auto& visited = trace.states();
  std::uniform_int_distribution<std::size_t> pick(0, visited.size() - 1);
  std::vector<Goal> goals(static_cast<std::size_t>(m));
  for (auto& g : goals) g = planar_projection(visited[pick(rng)]);
  return goals;
}

namespace {

void store_step(ReplayBuffer& buf, const TraceStep& s, const Goal& goal, const RelabelFn& reward_fn) {
  const RelabelOutcome out = reward_fn(s.state, s.action, s.next_state, goal);
  buf.store({s.state, s.action, out.reward, s.next_state, goal, out.done});
}

}  // namespace

void relabel_and_store(ReplayBuffer& buf, const EpisodeTrace& trace, const Goal& original_goal,
                       std::span<const Goal> hindsight_goals, const RelabelFn& reward_fn) {
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const TraceStep s = trace.step(t);
    store_step(buf, s, original_goal, reward_fn);
    for (const Goal& g : hindsight_goals) store_step(buf, s, g, reward_fn);
  }
}

void store_with_hindsight(ReplayBuffer& buf, const EpisodeTrace& trace, const Goal& original_goal,
                          int m, const RelabelFn& reward_fn, std::mt19937_64& rng) {
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const TraceStep s = trace.step(t);
    store_step(buf, s, original_goal, reward_fn);
    if (m <= 0) continue;
    for (const Goal& g : sample_additional_goals(trace, m, rng)) store_step(buf, s, g, reward_fn);
  }
}

}  // namespace sacher
