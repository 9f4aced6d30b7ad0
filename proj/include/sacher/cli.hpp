#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sacher::cli {

// Entry point behind the `sacher` binary: `sacher <train|eval|plot> [flags]`.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

struct TrainArgs {
  std::string env = "env1";
  std::string algo = "sacher";
  std::optional<int> episodes;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> env_spec;
  std::optional<std::filesystem::path> out;
  std::optional<int> her_goals;
  std::optional<int> eval_interval;
  std::string variant_speed = "planar";
  int num_seeds = 1;
  int jobs = 1;
  int eval_episodes = 1;
  bool dump_buffer = false;
};

struct EvalArgs {
  std::filesystem::path checkpoint;
  std::string env = "env1";
  std::optional<std::filesystem::path> env_spec;
  std::optional<std::filesystem::path> out;
  std::string variant_speed = "planar";
  int eval_episodes = 10;
  std::uint64_t seed = 1;
  bool stochastic = false;
};

struct PlotArgs {
  std::optional<std::filesystem::path> log;
  std::vector<std::filesystem::path> trajectories;
  std::string env = "env1";
  std::optional<std::filesystem::path> env_spec;
  std::string variant_speed = "planar";
  std::filesystem::path out = ".";
};

int cmd_train(const TrainArgs& args);
int cmd_eval(const EvalArgs& args);
int cmd_plot(const PlotArgs& args);

// Root for run directories: $SACHER_OUT if set, else ./runs.
std::filesystem::path default_output_root();

}  // namespace sacher::cli
