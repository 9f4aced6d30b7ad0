#include "sacher/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sacher/checkpoint.hpp"
#include "sacher/config.hpp"
#include "sacher/csv_io.hpp"
#include "sacher/errors.hpp"
#include "sacher/plot.hpp"
#include "sacher/train.hpp"

#ifndef SACHER_BUILD_ID
#define SACHER_BUILD_ID "unknown"
#endif

namespace sacher::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;
constexpr int kExitNumerical = 3;

VariantSpeed parse_variant(const std::string& s) {
  if (s == "planar") return VariantSpeed::kPlanar;
  if (s == "descent") return VariantSpeed::kDescent;
  throw std::invalid_argument("--env2a-speed must be 'planar' or 'descent'");
}

EnvSpec resolve_env(const std::string& name, const std::optional<fs::path>& spec_file,
                    const std::string& variant) {
  EnvSpec spec = make_env(name, parse_variant(variant));
  if (spec_file) spec = load_env_spec(*spec_file, spec);
  spec.validate();
  return spec;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
}

struct RunPlan {
  TrainConfig config;
  EnvSpec env;
  std::string algo;
  fs::path dir;
};

struct RunOutcome {
  int exit_code = kExitOk;
  int successes = 0;
  double best_reward = -std::numeric_limits<double>::infinity();
  std::string error;
};

RunOutcome execute_run(const RunPlan& plan, int eval_episodes, bool dump_buffer) {
  RunOutcome outcome;
  fs::create_directories(plan.dir / "checkpoints");

  json manifest{{"config", to_json(plan.config)},
                {"seed", plan.config.seed},
                {"environment", plan.env.name},
                {"environment_spec", to_json(plan.env)},
                {"algorithm", plan.algo},
                {"output_dir", plan.dir.string()},
                {"build", SACHER_BUILD_ID}};
  write_text(plan.dir / "manifest.json", manifest.dump(2) + "\n");

  EpisodeLogWriter log(plan.dir / "episodes.csv");
  const int interval = plan.config.eval_interval;
  auto on_episode = [&](const EpisodeRecord& rec, const SacLearner& learner) {
    log.append(rec);
    if (rec.success) ++outcome.successes;
    outcome.best_reward = std::max(outcome.best_reward, rec.cum_reward);
    if (interval > 0 && rec.episode % interval == 0) {
      save_checkpoint(plan.dir / "checkpoints" / ("episode_" + std::to_string(rec.episode) + ".ckpt"),
                      learner.to_checkpoint());
    }
  };

  try {
    TrainResult result = train(plan.env, plan.config, on_episode);
    save_checkpoint(plan.dir / "final.ckpt", result.learner.to_checkpoint());
    if (eval_episodes > 0) {
      const GaussianPolicy& pol = result.learner.policy();
      const Rollout r = rollout(
          [&](const UavState& s, const Goal& g) { return pol.deterministic_action(s, g); }, plan.env);
      write_trajectory(plan.dir / "final_trajectory.csv", r);
    }
    if (dump_buffer) write_buffer_dump(plan.dir / "buffer.csv", result.buffer);
  } catch (const NumericalFault& e) {
    outcome.exit_code = kExitNumerical;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace

fs::path default_output_root() {
  if (const char* env = std::getenv("SACHER_OUT"); env && *env) return fs::path(env);
  return fs::path("runs");
}

int cmd_train(const TrainArgs& args) {
  TrainConfig base;
  if (args.config) apply_json(read_json_file(*args.config), base);
  if (args.algo == "sac") {
    base.use_her = false;
  } else if (args.algo == "sacher") {
    base.use_her = true;
  } else {
    throw std::invalid_argument("--algo must be 'sacher' or 'sac'");
  }
  if (args.episodes) base.episodes = *args.episodes;
  if (args.seed) base.seed = *args.seed;
  if (args.her_goals) base.her_goals = *args.her_goals;
  if (args.eval_interval) base.eval_interval = *args.eval_interval;
  base.validate();
  if (args.num_seeds < 1) throw std::invalid_argument("--num-seeds must be at least 1");
  if (args.jobs < 1) throw std::invalid_argument("--jobs must be at least 1");

  const EnvSpec env = resolve_env(args.env, args.env_spec, args.variant_speed);

  std::vector<RunPlan> plans;
  for (int k = 0; k < args.num_seeds; ++k) {
    RunPlan plan{base, env, args.algo, {}};
    plan.config.seed = base.seed + static_cast<std::uint64_t>(k);
    const std::string leaf = env.name + "-" + args.algo + "-seed" + std::to_string(plan.config.seed);
    if (args.out) {
      plan.dir = args.num_seeds == 1 ? *args.out : *args.out / leaf;
    } else {
      plan.dir = default_output_root() / leaf;
    }
    plans.push_back(std::move(plan));
  }

  std::vector<RunOutcome> outcomes(plans.size());
  std::mutex print_mutex;
  std::size_t next = 0;
  auto worker = [&]() {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(print_mutex);
        if (next >= plans.size()) return;
        i = next++;
      }
      outcomes[i] = execute_run(plans[i], args.eval_episodes, args.dump_buffer);
      std::lock_guard lock(print_mutex);
      const RunOutcome& o = outcomes[i];
      std::cout << plans[i].dir.string() << ": " << o.successes << " successful episodes of "
                << plans[i].config.episodes;
      if (plans[i].config.episodes > 0) std::cout << ", best cumulative reward " << o.best_reward;
      std::cout << '\n';
      if (!o.error.empty()) std::cerr << "training aborted: " << o.error << '\n';
    }
  };
  const int jobs = std::min<int>(args.jobs, static_cast<int>(plans.size()));
  std::vector<std::thread> threads;
  for (int j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  int code = kExitOk;
  for (const auto& o : outcomes) code = std::max(code, o.exit_code);
  return code;
}

int cmd_eval(const EvalArgs& args) {
  if (!fs::exists(args.checkpoint)) {
    std::cerr << "checkpoint not found: " << args.checkpoint.string() << '\n';
    return kExitFailure;
  }
  if (args.eval_episodes < 1) throw std::invalid_argument("--eval-episodes must be at least 1");
  const Checkpoint ckpt = load_checkpoint(args.checkpoint);
  const GaussianPolicy policy = policy_from_checkpoint(ckpt);
  const EnvSpec env = resolve_env(args.env, args.env_spec, args.variant_speed);
  const fs::path out_dir = args.out ? *args.out : args.checkpoint.parent_path() / "eval";
  fs::create_directories(out_dir);

  std::mt19937_64 rng(args.seed);
  int successes = 0;
  double reward_sum = 0.0;
  json summary{{"checkpoint", args.checkpoint.string()},
               {"environment", env.name},
               {"stochastic", args.stochastic},
               {"seed", args.seed},
               {"episodes", json::array()}};
  std::cout << std::setprecision(10);
  for (int i = 0; i < args.eval_episodes; ++i) {
    const ActionFn act = [&](const UavState& s, const Goal& g) {
      return args.stochastic ? policy.sample(s, g, rng).action : policy.deterministic_action(s, g);
    };
    const Rollout r = rollout(act, env);
    const fs::path traj = out_dir / ("trajectory_" + std::to_string(i) + ".csv");
    write_trajectory(traj, r);
    successes += r.landed ? 1 : 0;
    reward_sum += r.cumulative_reward;
    json ep{{"index", i},
            {"cumulative_reward", r.cumulative_reward},
            {"landed", r.landed},
            {"steps", r.steps()},
            {"trajectory", traj.string()}};
    std::cout << "episode " << i << ": R = " << r.cumulative_reward << ", steps " << r.steps()
              << (r.landed ? ", landed" : ", missed");
    if (!env.obstacles.empty()) {
      ep["min_clearance"] = r.min_clearance;
      ep["collision_free"] = r.collision_free;
      std::cout << ", min clearance " << r.min_clearance << " m"
                << (r.collision_free ? "" : " (margin violated)");
    }
    std::cout << '\n';
    summary["episodes"].push_back(ep);
  }
  const double rate = static_cast<double>(successes) / args.eval_episodes;
  const double mean = reward_sum / args.eval_episodes;
  summary["success_rate"] = rate;
  summary["mean_cumulative_reward"] = mean;
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  std::cout << "success rate " << rate << ", mean cumulative reward " << mean << '\n';
  return kExitOk;
}

int cmd_plot(const PlotArgs& args) {
  if (!args.log && args.trajectories.empty()) {
    std::cerr << "plot: pass --log and/or --trajectory\n";
    return kExitUsage;
  }
  fs::create_directories(args.out);
  if (args.log) {
    const auto log = read_episode_log(*args.log);
    write_text(args.out / "learning_curve.svg", learning_curve_svg(log));
    std::cout << "wrote " << (args.out / "learning_curve.svg").string() << '\n';
  }
  if (!args.trajectories.empty()) {
    const EnvSpec env = resolve_env(args.env, args.env_spec, args.variant_speed);
    std::vector<std::vector<TrajectoryRow>> paths;
    for (const auto& p : args.trajectories) paths.push_back(read_trajectory(p));
    write_text(args.out / "path.svg", path_svg(env, paths));
    std::cout << "wrote " << (args.out / "path.svg").string() << '\n';
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
  CLI::App app{"SACHER: soft actor-critic with hindsight experience replay for UAV landing"};
  app.require_subcommand(1);
  const std::vector<std::string> envs{"env1", "env2", "env2a", "env2b"};

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a policy and write a run directory");
  train_cmd->add_option("--env", train_args.env, "Environment")->check(CLI::IsMember(envs));
  train_cmd->add_option("--algo", train_args.algo, "sacher or sac (HER off)")
      ->check(CLI::IsMember({"sacher", "sac"}));
  train_cmd->add_option("--episodes", train_args.episodes, "Training episodes");
  train_cmd->add_option("--seed", train_args.seed, "Random seed");
  train_cmd->add_option("--config", train_args.config, "JSON training config")->check(CLI::ExistingFile);
  train_cmd->add_option("--env-spec", train_args.env_spec, "JSON environment spec")->check(CLI::ExistingFile);
  train_cmd->add_option("--out", train_args.out, "Run directory (default $SACHER_OUT/<env>-<algo>-seed<N>)");
  train_cmd->add_option("--her-goals", train_args.her_goals, "Hindsight goals per step (m)");
  train_cmd->add_option("--eval-interval", train_args.eval_interval, "Episodes between checkpoints");
  train_cmd->add_option("--eval-episodes", train_args.eval_episodes,
                        "Write the final deterministic trajectory when > 0");
  train_cmd->add_option("--num-seeds", train_args.num_seeds, "Independent seeds seed, seed+1, ...");
  train_cmd->add_option("--jobs", train_args.jobs, "Seeds trained in parallel");
  train_cmd->add_option("--env2a-speed", train_args.variant_speed, "planar (v1 = 8) or descent (v2 = 8)");
  train_cmd->add_flag("--dump-buffer", train_args.dump_buffer, "Write the final replay buffer to buffer.csv");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Roll out a trained policy");
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--env", eval_args.env, "Environment")->check(CLI::IsMember(envs));
  eval_cmd->add_option("--env-spec", eval_args.env_spec, "JSON environment spec")->check(CLI::ExistingFile);
  eval_cmd->add_option("--out", eval_args.out, "Output directory (default <checkpoint dir>/eval)");
  eval_cmd->add_option("--eval-episodes", eval_args.eval_episodes, "Number of rollouts");
  eval_cmd->add_option("--seed", eval_args.seed, "Seed for stochastic rollouts");
  eval_cmd->add_flag("--stochastic", eval_args.stochastic, "Sample actions instead of using the mean");
  eval_cmd->add_option("--env2a-speed", eval_args.variant_speed, "planar (v1 = 8) or descent (v2 = 8)");

  PlotArgs plot_args;
  auto* plot_cmd = app.add_subcommand("plot", "Render SVG learning curves and paths");
  plot_cmd->add_option("--log", plot_args.log, "Episode log CSV");
  plot_cmd->add_option("--trajectory", plot_args.trajectories, "Trajectory CSV (repeatable)");
  plot_cmd->add_option("--env", plot_args.env, "Environment for the path plot")->check(CLI::IsMember(envs));
  plot_cmd->add_option("--env-spec", plot_args.env_spec, "JSON environment spec")->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot_args.out, "Output directory");
  plot_cmd->add_option("--env2a-speed", plot_args.variant_speed, "planar (v1 = 8) or descent (v2 = 8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train_cmd) return cmd_train(train_args);
    if (*eval_cmd) return cmd_eval(eval_args);
    if (*plot_cmd) return cmd_plot(plot_args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace sacher::cli
