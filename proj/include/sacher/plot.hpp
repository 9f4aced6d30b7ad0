#pragma once

#include <span>
#include <string>
#include <vector>

#include "sacher/csv_io.hpp"
#include "sacher/env_uav.hpp"

namespace sacher {

inline constexpr int kMovingAverageWindow = 20;

// Entry k averages the last min(k + 1, window) values up to and including k.
std::vector<double> trailing_mean(std::span<const double> values, int window = kMovingAverageWindow);

// Raw cumulative reward per episode with its trailing mean.
std::string learning_curve_svg(const std::vector<EpisodeRecord>& log,
                               int window = kMovingAverageWindow);

// Top-down view: landing square, one circle per obstacle, and each path.
std::string path_svg(const EnvSpec& spec, const std::vector<std::vector<TrajectoryRow>>& paths);

}  // namespace sacher
