#include "gesturegen/motion/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::motion {

namespace {
constexpr double kMadScale = 1.4826;

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (n % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid) - 1,
                     v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + v[mid - 1]);
  }
  return m;
}
}  // namespace

double AnomalyReport::flagged_fraction() const {
  if (frames_checked == 0) return 0.0;
  std::set<std::size_t> frames;
  for (const AnomalyFlag& f : flags) frames.insert(f.frame);
  return static_cast<double>(frames.size()) / static_cast<double>(frames_checked);
}

AnomalyReport detect_speed_anomalies(const JointPositions& positions,
                                     const std::vector<std::size_t>& joints,
                                     std::size_t window, double threshold,
                                     double mad_floor) {
  const std::size_t frames = positions.frame_count();
  if (window % 2 == 0)
    throw std::invalid_argument(cat("hampel window must be odd, got ", window));
  if (window >= frames)
    throw std::invalid_argument(
        cat("hampel window ", window, " must be smaller than frame count ", frames));

  AnomalyReport report;
  report.frames_checked = frames;
  const std::size_t half = window / 2;

  for (std::size_t joint : joints) {
    if (3 * joint + 3 > static_cast<std::size_t>(positions.xyz.cols()))
      throw std::invalid_argument(cat("joint index ", joint, " out of range"));
    // speeds[i] is the speed at frame i+1.
    std::vector<double> speeds(frames - 1);
    for (std::size_t t = 1; t < frames; ++t)
      speeds[t - 1] = (positions.at(t, joint) - positions.at(t - 1, joint)).norm() *
                      positions.frame_rate;

    for (std::size_t i = 0; i < speeds.size(); ++i) {
      const std::size_t lo = i >= half ? i - half : 0;
      const std::size_t hi = std::min(i + half + 1, speeds.size());
      std::vector<double> win(speeds.begin() + static_cast<std::ptrdiff_t>(lo),
                              speeds.begin() + static_cast<std::ptrdiff_t>(hi));
      const double med = median_of(win);
      for (double& w : win) w = std::abs(w - med);
      const double mad = std::max(median_of(std::move(win)), mad_floor);
      const double score = std::abs(speeds[i] - med) / (kMadScale * mad);
      if (score > threshold) {
        report.flags.push_back(AnomalyFlag{
            i + 1, positions.skeleton->joints[joint].name, speeds[i], med, score});
      }
    }
  }
  std::sort(report.flags.begin(), report.flags.end(),
            [](const AnomalyFlag& a, const AnomalyFlag& b) {
              return a.frame != b.frame ? a.frame < b.frame : a.joint < b.joint;
            });
  return report;
}

void write_anomaly_report(std::ostream& out, const std::string& file,
                          const AnomalyReport& report) {
  char buf[160];
  for (const AnomalyFlag& f : report.flags) {
    std::snprintf(buf, sizeof(buf), "%s\t%zu\t%s\t%.6g\t%.6g\t%.6g\n",
                  file.c_str(), f.frame, f.joint.c_str(), f.speed, f.median,
                  f.score);
    out << buf;
  }
}

}  // namespace gesturegen::motion
