#pragma once

#include <filesystem>

#include <json.hpp>

#include "sacher/env_uav.hpp"
#include "sacher/train.hpp"

namespace sacher {

nlohmann::json to_json(const TrainConfig& config);
// Overrides only the keys present in `j`; unknown keys are rejected.
void apply_json(const nlohmann::json& j, TrainConfig& config);

nlohmann::json to_json(const EnvParams& params);
void apply_json(const nlohmann::json& j, EnvParams& params);

// {"name", "initial_state": [x, y, z, psi, psi_dot], "goal": [gx, gy],
//  "obstacles": [{"x", "y", "r"}], "params": {...overrides}}
nlohmann::json to_json(const EnvSpec& spec);
// Fields missing from `j` keep the values of `base`.
EnvSpec env_spec_from_json(const nlohmann::json& j, EnvSpec base = {});
EnvSpec load_env_spec(const std::filesystem::path& path, EnvSpec base = {});

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace sacher
