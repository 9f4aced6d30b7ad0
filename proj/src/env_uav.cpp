#include "sacher/env_uav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sacher/errors.hpp"

namespace sacher {

namespace {

// Altitudes this close to the ground count as landed on it; repeated
// subtraction of v2*dt leaves rounding residue of order 1e-14.
constexpr double kGroundSnap = 1e-9;

std::vector<Obstacle> grid_obstacles(std::initializer_list<double> coords, double radius) {
  std::vector<Obstacle> out;
  for (double x : coords) {
    for (double y : coords) out.push_back({x, y, radius});
  }
  return out;
}

}  // namespace

void EnvParams::validate() const {
  const double values[] = {v1, v2, dt, torque_bound, lx, ly, k1, k2, c1, c2, c3};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("environment parameters must be positive and finite");
    }
  }
}

void EnvSpec::validate() const {
  params.validate();
  if (!initial_state.is_finite() || !goal.is_finite()) {
    throw std::invalid_argument("environment start and goal must be finite");
  }
  if (initial_state.z < 0.0) throw std::invalid_argument("initial altitude must be non-negative");
  for (const Obstacle& o : obstacles) {
    if (!(o.r > 0.0)) throw std::invalid_argument("obstacle radius must be positive");
    if (obstacle_margin(initial_state, o) <= 0.0) {
      throw std::invalid_argument("an obstacle covers the initial position");
    }
    // Nearest point of the landing square to the obstacle center.
    const double nx = std::clamp(o.x, goal.x - params.lx, goal.x + params.lx);
    const double ny = std::clamp(o.y, goal.y - params.ly, goal.y + params.ly);
    if ((nx - o.x) * (nx - o.x) + (ny - o.y) * (ny - o.y) <= o.r * o.r) {
      throw std::invalid_argument("an obstacle overlaps the landing area");
    }
  }
}

EnvSpec make_env1() { return EnvSpec{}; }

EnvSpec make_env2() {
  EnvSpec spec;
  spec.name = "env2";
  spec.obstacles = grid_obstacles({5.0, 10.0, 15.0}, 1.0);
  return spec;
}

EnvSpec make_env2a(VariantSpeed which) {
  EnvSpec spec = make_env2();
  spec.name = "env2a";
  if (which == VariantSpeed::kPlanar) {
    spec.params.v1 = 8.0;
  } else {
    spec.params.v2 = 8.0;
  }
  return spec;
}

EnvSpec make_env2b() {
  EnvSpec spec;
  spec.name = "env2b";
  spec.obstacles = grid_obstacles({4.0, 8.0, 12.0, 16.0}, 1.0);
  return spec;
}

EnvSpec make_env(std::string_view name, VariantSpeed variant) {
  if (name == "env1") return make_env1();
  if (name == "env2") return make_env2();
  if (name == "env2a") return make_env2a(variant);
  if (name == "env2b") return make_env2b();
  throw std::invalid_argument("unknown environment '" + std::string(name) +
                              "' (expected env1, env2, env2a or env2b)");
}

double clamp_torque(double torque, const EnvParams& params, bool* clamped) {
  if (!std::isfinite(torque)) throw NumericalFault("non-finite torque passed to the environment");
  const double c = std::clamp(torque, -params.torque_bound, params.torque_bound);
  if (clamped) *clamped = (c != torque);
  return c;
}

UavState step(const UavState& s, double torque, const EnvParams& p) {
  const double tau = clamp_torque(torque, p);
  UavState n;
  n.x = s.x + p.v1 * std::cos(s.psi) * p.dt;
  n.y = s.y + p.v1 * std::sin(s.psi) * p.dt;
  n.z = s.z - p.v2 * p.dt;
  if (n.z <= kGroundSnap) n.z = 0.0;
  n.psi = s.psi + s.psi_dot * p.dt;
  n.psi_dot = s.psi_dot + tau * p.dt;
  return n;
}

bool in_landing_area(const UavState& s, const Goal& g, const EnvParams& p) {
  return std::abs(s.x - g.x) <= p.lx && std::abs(s.y - g.y) <= p.ly;
}

double obstacle_margin(const UavState& s, const Obstacle& o) {
  const double dx = s.x - o.x;
  const double dy = s.y - o.y;
  return dx * dx + dy * dy - o.r * o.r;
}

double reward(const UavState& s, const Goal& g, const EnvParams& p,
              std::span<const Obstacle> obstacles) {
  const double dx = s.x - g.x;
  const double dy = s.y - g.y;
  double r = -p.k1 * (dx * dx + dy * dy) - p.k2 * s.z * s.z;
  if (in_landing_area(s, g, p)) r += p.c1;
  for (const Obstacle& o : obstacles) {
    if (obstacle_margin(s, o) <= p.c3) r -= p.c2;
  }
  return r;
}

Termination is_terminal(const UavState& s, const Goal& g, const EnvParams& p) {
  Termination t;
  t.landed = in_landing_area(s, g, p);
  t.done = t.landed || s.z <= 0.0;
  return t;
}

int max_episode_steps(const EnvSpec& spec) {
  const double per_step = spec.params.v2 * spec.params.dt;
  return static_cast<int>(std::ceil(spec.initial_state.z / per_step - 1e-9));
}

Rollout rollout(const ActionFn& policy, const EnvSpec& spec) {
  const EnvParams& p = spec.params;
  Rollout out;
  out.trace = EpisodeTrace(spec.initial_state);
  out.min_clearance = std::numeric_limits<double>::infinity();

  auto track_obstacles = [&](const UavState& s) {
    for (const Obstacle& o : spec.obstacles) {
      if (obstacle_margin(s, o) <= p.c3) out.collision_free = false;
      out.min_clearance = std::min(out.min_clearance, std::hypot(s.x - o.x, s.y - o.y) - o.r);
    }
  };

  UavState state = spec.initial_state;
  out.initial_reward = reward(state, spec.goal, p, spec.obstacles);
  out.cumulative_reward = out.initial_reward;
  track_obstacles(state);
  Termination term = is_terminal(state, spec.goal, p);
  out.landed = term.landed;

  // The altitude budget bounds the loop; the extra slack only guards
  // against a misconfigured descent speed.
  const int limit = max_episode_steps(spec) + 1;
  while (!term.done) {
    if (out.steps() >= limit) {
      throw std::logic_error("rollout exceeded the altitude step budget");
    }
    bool clamped = false;
    const double action = clamp_torque(policy(state, spec.goal), p, &clamped);
    if (clamped) ++out.clamped_actions;
    const UavState next = step(state, action, p);
    const double r = reward(next, spec.goal, p, spec.obstacles);
    out.trace.append(action, next);
    out.rewards.push_back(r);
    out.cumulative_reward += r;
    track_obstacles(next);
    term = is_terminal(next, spec.goal, p);
    out.landed = term.landed;
    state = next;
  }
  return out;
}

RelabelFn make_relabel_fn(const EnvSpec& spec) {
  return [params = spec.params, obstacles = spec.obstacles](
             const UavState&, double, const UavState& next, const Goal& goal) {
    return RelabelOutcome{reward(next, goal, params, obstacles), is_terminal(next, goal, params).done};
  };
}

IdealPath ideal_path(const EnvSpec& spec) {
  const double bound = spec.params.torque_bound;
  IdealPath best;
  best.cumulative_reward = -std::numeric_limits<double>::infinity();
  bool have_landing = false;

  auto consider = [&](double torque, int turn_steps, int coast_steps) {
    int t = 0;
    auto schedule = [&](const UavState&, const Goal&) {
      const int k = t++;
      if (k < turn_steps) return torque;
      if (k < turn_steps + coast_steps) return 0.0;
      if (k < 2 * turn_steps + coast_steps) return -torque;
      return 0.0;
    };
    const Rollout r = rollout(schedule, spec);
    const bool better = (r.landed && !have_landing) ||
                        (r.landed == have_landing && r.cumulative_reward > best.cumulative_reward);
    if (!better) return;
    have_landing = have_landing || r.landed;
    best.cumulative_reward = r.cumulative_reward;
    best.landed = r.landed;
    best.torques = r.trace.actions();
    best.states = r.trace.states();
  };

  consider(0.0, 0, 0);
  constexpr int kTorqueLevels = 10;
  for (int level = 1; level <= kTorqueLevels; ++level) {
    for (double sign : {-1.0, 1.0}) {
      const double torque = sign * bound * level / kTorqueLevels;
      for (int turn = 1; turn <= 20; ++turn) {
        for (int coast = 0; coast <= 40; ++coast) consider(torque, turn, coast);
      }
    }
  }
  return best;
}

double ideal_reward_oracle(const EnvSpec& spec) { return ideal_path(spec).cumulative_reward; }

}  // namespace sacher
