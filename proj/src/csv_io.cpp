#include "sacher/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sacher {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double to_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

// Reads a CSV whose first line must equal `header`.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  std::string_view header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::runtime_error(path.string() + ": expected header '" + std::string(header) + "'");
  }
  const std::size_t columns = split(std::string(header)).size();
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != columns) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " fields");
    }
    std::vector<double> row;
    row.reserve(columns);
    for (const auto& f : fields) row.push_back(to_double(f, path, line_no));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_record(std::ostream& out, const EpisodeRecord& r) {
  out << r.episode << ',' << r.cum_reward << ',' << (r.success ? 1 : 0) << ',' << r.steps << ','
      << r.alpha << ',' << r.wallclock_s << '\n';
}

}  // namespace

EpisodeLogWriter::EpisodeLogWriter(const std::filesystem::path& path) : out_(open_for_write(path)) {
  out_ << kEpisodeLogHeader << '\n';
  out_.flush();
}

void EpisodeLogWriter::append(const EpisodeRecord& rec) {
  write_record(out_, rec);
  // Flushed per row so an aborted run keeps its partial log.
  out_.flush();
}

void write_episode_log(std::ostream& out, const std::vector<EpisodeRecord>& log) {
  out << std::setprecision(17) << kEpisodeLogHeader << '\n';
  for (const auto& r : log) write_record(out, r);
}

std::vector<EpisodeRecord> read_episode_log(const std::filesystem::path& path) {
  std::vector<EpisodeRecord> log;
  for (const auto& row : read_numeric_csv(path, kEpisodeLogHeader)) {
    EpisodeRecord r;
    r.episode = static_cast<int>(row[0]);
    r.cum_reward = row[1];
    r.success = row[2] != 0.0;
    r.steps = static_cast<int>(row[3]);
    r.alpha = row[4];
    r.wallclock_s = row[5];
    log.push_back(r);
  }
  return log;
}

std::vector<TrajectoryRow> trajectory_rows(const Rollout& r) {
  std::vector<TrajectoryRow> rows;
  const auto& states = r.trace.states();
  const auto& actions = r.trace.actions();
  for (std::size_t t = 0; t < actions.size(); ++t) {
    rows.push_back({static_cast<int>(t + 1), states[t + 1], actions[t], r.rewards[t]});
  }
  return rows;
}

void write_trajectory(const std::filesystem::path& path, const Rollout& r) {
  std::ofstream out = open_for_write(path);
  out << kTrajectoryHeader << '\n';
  for (const auto& row : trajectory_rows(r)) {
    const UavState& s = row.state;
    out << row.t << ',' << s.x << ',' << s.y << ',' << s.z << ',' << s.psi << ',' << s.psi_dot << ','
        << row.tau << ',' << row.reward << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<TrajectoryRow> read_trajectory(const std::filesystem::path& path) {
  std::vector<TrajectoryRow> rows;
  for (const auto& v : read_numeric_csv(path, kTrajectoryHeader)) {
    rows.push_back({static_cast<int>(v[0]), {v[1], v[2], v[3], v[4], v[5]}, v[6], v[7]});
  }
  return rows;
}

void write_buffer_dump(const std::filesystem::path& path, const ReplayBuffer& buf) {
  std::ofstream out = open_for_write(path);
  out << kBufferDumpHeader << '\n';
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const Transition& t = buf.at(i);
    const UavState& s = t.state;
    const UavState& n = t.next_state;
    out << s.x << ',' << s.y << ',' << s.z << ',' << s.psi << ',' << s.psi_dot << ',' << t.action << ','
        << t.reward << ',' << n.x << ',' << n.y << ',' << n.z << ',' << n.psi << ',' << n.psi_dot << ','
        << t.goal.x << ',' << t.goal.y << ',' << (t.done ? 1 : 0) << '\n';
  }
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace sacher
