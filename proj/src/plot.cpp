#include "sacher/plot.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sacher {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 50.0;

const char* const kPathColors[] = {"#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#17becf"};

// Maps data coordinates onto the plotting area (y grows upward).
struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
  double sx(double d) const { return d / (x1 - x0) * (kWidth - 2 * kMargin); }
  double sy(double d) const { return d / (y1 - y0) * (kHeight - 2 * kMargin); }
};

void open_svg(std::ostringstream& out) {
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& out, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin
      << "\" y2=\"" << kHeight - kMargin << "\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 15 << "\">" << f.x0 << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 15
      << "\" text-anchor=\"end\">" << f.x1 << "</text>\n";
  out << "<text x=\"" << kMargin - 5 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\">" << f.y0
      << "</text>\n";
  out << "<text x=\"" << kMargin - 5 << "\" y=\"" << kMargin + 4 << "\" text-anchor=\"end\">" << f.y1
      << "</text>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  out << "</g>\n";
}

void polyline(std::ostringstream& out, const std::vector<std::pair<double, double>>& pts,
              const std::string& cls, const std::string& color, const std::string& extra = "") {
  out << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color << "\" " << extra
      << " points=\"";
  for (const auto& [x, y] : pts) out << x << ',' << y << ' ';
  out << "\"/>\n";
}

}  // namespace

std::vector<double> trailing_mean(std::span<const double> values, int window) {
  if (window <= 0) throw std::invalid_argument("trailing_mean window must be positive");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    sum += values[k];
    if (k >= static_cast<std::size_t>(window)) sum -= values[k - window];
    const std::size_t count = std::min<std::size_t>(k + 1, window);
    out[k] = sum / static_cast<double>(count);
  }
  return out;
}

std::string learning_curve_svg(const std::vector<EpisodeRecord>& log, int window) {
  std::vector<double> rewards;
  for (const auto& r : log) rewards.push_back(r.cum_reward);
  const std::vector<double> avg = trailing_mean(rewards, window);

  Frame f{0.0, std::max<double>(1.0, static_cast<double>(log.size())), -1.0, 1.0};
  if (!rewards.empty()) {
    const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
    const double pad = std::max(1.0, 0.05 * (*hi - *lo));
    f.y0 = std::floor(*lo - pad);
    f.y1 = std::ceil(*hi + pad);
  }

  std::ostringstream out;
  open_svg(out);
  axes(out, f, "episode", "cumulative reward");
  std::vector<std::pair<double, double>> raw_pts, avg_pts;
  for (std::size_t k = 0; k < log.size(); ++k) {
    raw_pts.emplace_back(f.px(log[k].episode), f.py(rewards[k]));
    avg_pts.emplace_back(f.px(log[k].episode), f.py(avg[k]));
  }
  polyline(out, raw_pts, "raw", "#8c510a", "stroke-width=\"1\"");
  polyline(out, avg_pts, "moving-average", "#dfc27d", "stroke-width=\"2\" stroke-dasharray=\"4 2\"");
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kMargin - 10
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">solid: cumulative reward, dashed: mean of last "
      << window << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

std::string path_svg(const EnvSpec& spec, const std::vector<std::vector<TrajectoryRow>>& paths) {
  double x0 = std::min(spec.goal.x, spec.initial_state.x);
  double x1 = std::max(spec.goal.x, spec.initial_state.x);
  double y0 = std::min(spec.goal.y, spec.initial_state.y);
  double y1 = std::max(spec.goal.y, spec.initial_state.y);
  for (const auto& o : spec.obstacles) {
    x0 = std::min(x0, o.x - o.r);
    x1 = std::max(x1, o.x + o.r);
    y0 = std::min(y0, o.y - o.r);
    y1 = std::max(y1, o.y + o.r);
  }
  for (const auto& path : paths) {
    for (const auto& row : path) {
      x0 = std::min(x0, row.state.x);
      x1 = std::max(x1, row.state.x);
      y0 = std::min(y0, row.state.y);
      y1 = std::max(y1, row.state.y);
    }
  }
  // Same scale on both axes so circles stay round.
  const double span = std::max(x1 - x0, y1 - y0) + 2.0;
  const double cx = 0.5 * (x0 + x1);
  const double cy = 0.5 * (y0 + y1);
  const double aspect = (kHeight - 2 * kMargin) / (kWidth - 2 * kMargin);
  Frame f{cx - span / 2 / aspect, cx + span / 2 / aspect, cy - span / 2, cy + span / 2};

  std::ostringstream out;
  open_svg(out);
  axes(out, f, "x [m]", "y [m]");
  const EnvParams& p = spec.params;
  out << "<rect class=\"landing-area\" x=\"" << f.px(spec.goal.x - p.lx) << "\" y=\""
      << f.py(spec.goal.y + p.ly) << "\" width=\"" << f.sx(2 * p.lx) << "\" height=\"" << f.sy(2 * p.ly)
      << "\" fill=\"#fdae61\" stroke=\"#d73027\"/>\n";
  for (const auto& o : spec.obstacles) {
    out << "<circle class=\"obstacle\" cx=\"" << f.px(o.x) << "\" cy=\"" << f.py(o.y) << "\" r=\""
        << f.sx(o.r) << "\" fill=\"#d73027\" fill-opacity=\"0.6\"/>\n";
  }
  std::size_t color = 0;
  for (const auto& path : paths) {
    std::vector<std::pair<double, double>> pts{{f.px(spec.initial_state.x), f.py(spec.initial_state.y)}};
    for (const auto& row : path) pts.emplace_back(f.px(row.state.x), f.py(row.state.y));
    polyline(out, pts, "path", kPathColors[color++ % std::size(kPathColors)], "stroke-width=\"1.5\"");
  }
  out << "<rect class=\"start\" x=\"" << f.px(spec.initial_state.x) - 3 << "\" y=\""
      << f.py(spec.initial_state.y) - 3 << "\" width=\"6\" height=\"6\" fill=\"black\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace sacher
