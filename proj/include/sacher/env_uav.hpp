#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sacher/replay.hpp"
#include "sacher/types.hpp"

namespace sacher {

struct EnvParams {
  double v1 = 2.0;            // planar speed
  double v2 = 0.5;            // descent speed
  double dt = 0.1;            // sampling time
  double torque_bound = 0.5;  // yaw torque limited to [-bound, bound]
  double lx = 0.2;            // landing square half-widths
  double ly = 0.2;
  double k1 = 1e-3;  // planar distance weight
  double k2 = 1e-4;  // altitude weight
  double c1 = 10.0;  // landing bonus
  double c2 = 10.0;  // obstacle penalty
  double c3 = 0.2;   // obstacle margin

  // Throws std::invalid_argument if any constant is non-positive.
  void validate() const;
};

// Vertical cylinder on the xy-plane.
struct Obstacle {
  double x = 0.0;
  double y = 0.0;
  double r = 1.0;
};

struct EnvSpec {
  std::string name = "env1";
  UavState initial_state{20.0, 20.0, 10.0, 5.0 * M_PI / 4.0, 0.0};
  Goal goal{0.0, 0.0};
  std::vector<Obstacle> obstacles;
  EnvParams params;

  // Checks params and that no obstacle covers the start or the landing square.
  void validate() const;
};

// How the II-A variant applies its speed of 8.
enum class VariantSpeed { kPlanar, kDescent };

EnvSpec make_env1();
EnvSpec make_env2();
EnvSpec make_env2a(VariantSpeed which = VariantSpeed::kPlanar);
EnvSpec make_env2b();
// Accepts env1, env2, env2a, env2b.
EnvSpec make_env(std::string_view name, VariantSpeed variant = VariantSpeed::kPlanar);

// Clamps to the torque bound. Non-finite torque is a NumericalFault.
double clamp_torque(double torque, const EnvParams& params, bool* clamped = nullptr);

// One kinematic update. Altitude snaps to exactly 0 once it reaches the ground.
UavState step(const UavState& state, double torque, const EnvParams& params);

// Distance shaping + landing bonus + per-obstacle penalties.
double reward(const UavState& state, const Goal& goal, const EnvParams& params,
              std::span<const Obstacle> obstacles = {});

bool in_landing_area(const UavState& state, const Goal& goal, const EnvParams& params);

struct Termination {
  bool done = false;
  bool landed = false;
};
Termination is_terminal(const UavState& state, const Goal& goal, const EnvParams& params);

// (x-xo)^2 + (y-yo)^2 - r^2; the penalty fires when this is <= c3.
double obstacle_margin(const UavState& state, const Obstacle& obstacle);

// Upper bound on episode length set by the altitude budget.
int max_episode_steps(const EnvSpec& spec);

using ActionFn = std::function<double(const UavState&, const Goal&)>;

struct Rollout {
  EpisodeTrace trace;
  // rewards[t] is the reward of the transition into trace.states()[t + 1].
  std::vector<double> rewards;
  double initial_reward = 0.0;
  // Sum of the reward over every visited state s_0 ... s_T.
  double cumulative_reward = 0.0;
  bool landed = false;
  // True when every visited state clears every obstacle's c3 margin.
  bool collision_free = true;
  // Smallest planar distance to any obstacle surface (infinity without obstacles).
  double min_clearance = 0.0;
  int clamped_actions = 0;

  int steps() const { return static_cast<int>(rewards.size()); }
};

Rollout rollout(const ActionFn& policy, const EnvSpec& spec);

// Builds the reward function the replay buffer uses for hindsight goals.
RelabelFn make_relabel_fn(const EnvSpec& spec);

struct IdealPath {
  double cumulative_reward = 0.0;
  bool landed = false;
  std::vector<double> torques;
  std::vector<UavState> states;
};

// Best landing trajectory among turn / coast / counter-turn manoeuvres
// followed by straight flight. For a start already heading at the goal this
// is the straight line.
IdealPath ideal_path(const EnvSpec& spec);
double ideal_reward_oracle(const EnvSpec& spec);

}  // namespace sacher
