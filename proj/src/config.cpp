#include "sacher/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

namespace sacher {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) {
      throw std::invalid_argument("unknown " + std::string(what) + " key '" + key + "'");
    }
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const TrainConfig& c) {
  const LearnerConfig& l = c.learner;
  return json{{"hidden", l.hidden},
              {"gamma", l.gamma},
              {"polyak", l.polyak},
              {"lr_critic", l.lr_critic},
              {"lr_actor", l.lr_actor},
              {"lr_alpha", l.lr_alpha},
              {"target_entropy", l.target_entropy},
              {"initial_alpha", l.initial_alpha},
              {"action_scale", l.action_scale},
              {"log_std_min", l.log_std_min},
              {"log_std_max", l.log_std_max},
              {"adam_beta1", l.adam_beta1},
              {"adam_beta2", l.adam_beta2},
              {"adam_epsilon", l.adam_epsilon},
              {"batch_size", c.batch_size},
              {"buffer_capacity", c.buffer_capacity},
              {"use_her", c.use_her},
              {"her_goals", c.her_goals},
              {"episodes", c.episodes},
              {"warmup_steps", c.warmup_steps},
              {"gradient_steps_per_env_step", c.gradient_steps_per_env_step},
              {"eval_interval", c.eval_interval},
              {"seed", c.seed}};
}

void apply_json(const json& j, TrainConfig& c) {
  reject_unknown(j,
                 {"hidden", "gamma", "polyak", "lr_critic", "lr_actor", "lr_alpha", "target_entropy",
                  "initial_alpha", "action_scale", "log_std_min", "log_std_max", "adam_beta1",
                  "adam_beta2", "adam_epsilon", "batch_size", "buffer_capacity", "use_her",
                  "her_goals", "episodes", "warmup_steps", "gradient_steps_per_env_step",
                  "eval_interval", "seed"},
                 "training config");
  LearnerConfig& l = c.learner;
  maybe(j, "hidden", l.hidden);
  maybe(j, "gamma", l.gamma);
  maybe(j, "polyak", l.polyak);
  maybe(j, "lr_critic", l.lr_critic);
  maybe(j, "lr_actor", l.lr_actor);
  maybe(j, "lr_alpha", l.lr_alpha);
  maybe(j, "target_entropy", l.target_entropy);
  maybe(j, "initial_alpha", l.initial_alpha);
  maybe(j, "action_scale", l.action_scale);
  maybe(j, "log_std_min", l.log_std_min);
  maybe(j, "log_std_max", l.log_std_max);
  maybe(j, "adam_beta1", l.adam_beta1);
  maybe(j, "adam_beta2", l.adam_beta2);
  maybe(j, "adam_epsilon", l.adam_epsilon);
  maybe(j, "batch_size", c.batch_size);
  maybe(j, "buffer_capacity", c.buffer_capacity);
  maybe(j, "use_her", c.use_her);
  maybe(j, "her_goals", c.her_goals);
  maybe(j, "episodes", c.episodes);
  maybe(j, "warmup_steps", c.warmup_steps);
  maybe(j, "gradient_steps_per_env_step", c.gradient_steps_per_env_step);
  maybe(j, "eval_interval", c.eval_interval);
  maybe(j, "seed", c.seed);
}

json to_json(const EnvParams& p) {
  return json{{"v1", p.v1}, {"v2", p.v2}, {"dt", p.dt}, {"torque_bound", p.torque_bound},
              {"lx", p.lx}, {"ly", p.ly}, {"k1", p.k1}, {"k2", p.k2},
              {"c1", p.c1}, {"c2", p.c2}, {"c3", p.c3}};
}

void apply_json(const json& j, EnvParams& p) {
  reject_unknown(j, {"v1", "v2", "dt", "torque_bound", "lx", "ly", "k1", "k2", "c1", "c2", "c3"},
                 "environment parameter");
  maybe(j, "v1", p.v1);
  maybe(j, "v2", p.v2);
  maybe(j, "dt", p.dt);
  maybe(j, "torque_bound", p.torque_bound);
  maybe(j, "lx", p.lx);
  maybe(j, "ly", p.ly);
  maybe(j, "k1", p.k1);
  maybe(j, "k2", p.k2);
  maybe(j, "c1", p.c1);
  maybe(j, "c2", p.c2);
  maybe(j, "c3", p.c3);
}

json to_json(const EnvSpec& spec) {
  json obstacles = json::array();
  for (const Obstacle& o : spec.obstacles) obstacles.push_back({{"x", o.x}, {"y", o.y}, {"r", o.r}});
  const UavState& s = spec.initial_state;
  return json{{"name", spec.name},
              {"initial_state", {s.x, s.y, s.z, s.psi, s.psi_dot}},
              {"goal", {spec.goal.x, spec.goal.y}},
              {"obstacles", obstacles},
              {"params", to_json(spec.params)}};
}

EnvSpec env_spec_from_json(const json& j, EnvSpec base) {
  reject_unknown(j, {"name", "initial_state", "goal", "obstacles", "params"}, "environment spec");
  maybe(j, "name", base.name);
  if (j.contains("initial_state")) {
    const auto v = j.at("initial_state").get<std::vector<double>>();
    if (v.size() != 5) throw std::invalid_argument("initial_state needs 5 values [x, y, z, psi, psi_dot]");
    base.initial_state = {v[0], v[1], v[2], v[3], v[4]};
  }
  if (j.contains("goal")) {
    const auto v = j.at("goal").get<std::vector<double>>();
    if (v.size() != 2) throw std::invalid_argument("goal needs 2 values [gx, gy]");
    base.goal = {v[0], v[1]};
  }
  if (j.contains("obstacles")) {
    base.obstacles.clear();
    for (const auto& o : j.at("obstacles")) {
      reject_unknown(o, {"x", "y", "r"}, "obstacle");
      base.obstacles.push_back({o.at("x").get<double>(), o.at("y").get<double>(), o.at("r").get<double>()});
    }
  }
  if (j.contains("params")) apply_json(j.at("params"), base.params);
  base.validate();
  return base;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument("malformed JSON in " + path.string() + ": " + e.what());
  }
}

EnvSpec load_env_spec(const std::filesystem::path& path, EnvSpec base) {
  return env_spec_from_json(read_json_file(path), std::move(base));
}

}  // namespace sacher
