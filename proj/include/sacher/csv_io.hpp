#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "sacher/env_uav.hpp"
#include "sacher/replay.hpp"
#include "sacher/train.hpp"

namespace sacher {

inline constexpr std::string_view kEpisodeLogHeader = "episode,cum_reward,success,steps,alpha,wallclock_s";
inline constexpr std::string_view kTrajectoryHeader = "t,x,y,z,psi,psidot,tau,reward";
inline constexpr std::string_view kBufferDumpHeader =
    "x,y,z,psi,psidot,tau,reward,nx,ny,nz,npsi,npsidot,gx,gy,done";

// Streams episode records as they arrive; the header is written on open.
class EpisodeLogWriter {
 public:
  explicit EpisodeLogWriter(const std::filesystem::path& path);

  void append(const EpisodeRecord& rec);

 private:
  std::ofstream out_;
};

void write_episode_log(std::ostream& out, const std::vector<EpisodeRecord>& log);
std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path& path);

// One row per transition: t = 1..T, the state reached, the torque that led
// there and the reward it earned.
struct TrajectoryRow {
  int t = 0;
  UavState state;
  double tau = 0.0;
  double reward = 0.0;
};

std::vector<TrajectoryRow> trajectory_rows(const Rollout& r);
void write_trajectory(const std::filesystem::path& path, const Rollout& r);
std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& path);

void write_buffer_dump(const std::filesystem::path& path, const ReplayBuffer& buf);

}  // namespace sacher
