#include "gesturegen/pipeline/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "gesturegen/common/strings.hpp"
#include "gesturegen/motion/anomaly.hpp"
#include "gesturegen/motion/kinematics.hpp"
#include "gesturegen/motion/pose.hpp"

namespace gesturegen::pipeline {

namespace {
std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}
}  // namespace

std::vector<std::size_t> select_joints(const motion::Skeleton& skeleton,
                                       const std::string& patterns) {
  std::vector<std::string> pats;
  std::size_t pos = 0;
  while (pos <= patterns.size()) {
    const auto comma = patterns.find(',', pos);
    const std::string p =
        lower(patterns.substr(pos, comma == std::string::npos ? comma : comma - pos));
    if (!p.empty()) pats.push_back(p);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < skeleton.joint_count(); ++j) {
    const std::string name = lower(skeleton.joints[j].name);
    for (const std::string& p : pats)
      if (name.find(p) != std::string::npos) {
        out.push_back(j);
        break;
      }
  }
  if (out.empty())  // nothing matched; fall back to every joint
    for (std::size_t j = 0; j < skeleton.joint_count(); ++j) out.push_back(j);
  return out;
}

ClipStats compute_stats(const std::string& file, const motion::BvhDocument& doc,
                        const PipelineConfig& config) {
  motion::ReferencePose tpose;
  if (!config.tpose_path.empty())
    tpose = motion::load_reference_pose(config.tpose_path);
  const motion::PoseSequence pose =
      motion::to_expmap(doc, tpose, config.include_root_translation);
  const motion::JointPositions positions = motion::forward_kinematics(pose, tpose);

  ClipStats stats;
  stats.file = file;
  stats.frames = positions.frame_count();
  stats.frame_rate = positions.frame_rate;

  const std::size_t joints = doc.skeleton->joint_count();
  const std::size_t frames = stats.frames;
  const double fps = positions.frame_rate;

  double speed_acc = 0;
  std::size_t speed_n = 0;
  for (std::size_t t = 1; t < frames; ++t)
    for (std::size_t j = 0; j < joints; ++j) {
      speed_acc += (positions.at(t, j) - positions.at(t - 1, j)).norm() * fps;
      ++speed_n;
    }
  stats.mean_joint_speed = speed_n ? speed_acc / double(speed_n) : 0.0;

  // Third difference via iterated first differences (exact for constants).
  double jerk_acc = 0;
  std::size_t jerk_n = 0;
  for (std::size_t t = 3; t < frames; ++t)
    for (std::size_t j = 0; j < joints; ++j) {
      const Eigen::Vector3d d1a = positions.at(t, j) - positions.at(t - 1, j);
      const Eigen::Vector3d d1b = positions.at(t - 1, j) - positions.at(t - 2, j);
      const Eigen::Vector3d d1c = positions.at(t - 2, j) - positions.at(t - 3, j);
      const Eigen::Vector3d d3 = (d1a - d1b) - (d1b - d1c);
      jerk_acc += d3.norm() * fps * fps * fps;
      ++jerk_n;
    }
  stats.mean_jerk = jerk_n ? jerk_acc / double(jerk_n) : 0.0;

  const auto wrists = select_joints(*doc.skeleton, config.hampel_joints);

  // Per-frame wrist speed (frame 0 counted at zero) for the histogram.
  std::vector<double> wrist_speed(frames, 0.0);
  for (std::size_t t = 1; t < frames; ++t) {
    double acc = 0;
    for (std::size_t j : wrists)
      acc += (positions.at(t, j) - positions.at(t - 1, j)).norm() * fps;
    wrist_speed[t] = acc / double(wrists.size());
  }
  const double max_speed =
      *std::max_element(wrist_speed.begin(), wrist_speed.end());
  const double hi = max_speed > 0 ? max_speed : 1.0;
  stats.hist_edges.resize(kHistogramBins + 1);
  for (std::size_t b = 0; b <= kHistogramBins; ++b)
    stats.hist_edges[b] = hi * double(b) / double(kHistogramBins);
  stats.hist_counts.assign(kHistogramBins, 0);
  for (double v : wrist_speed) {
    auto bin = static_cast<std::size_t>(v / hi * kHistogramBins);
    if (bin >= kHistogramBins) bin = kHistogramBins - 1;
    stats.hist_counts[bin] += 1;
  }

  if (config.hampel_window < frames) {
    const auto report = motion::detect_speed_anomalies(
        positions, wrists, config.hampel_window, config.hampel_threshold,
        config.mad_floor);
    stats.flagged_fraction = report.flagged_fraction();
  }
  return stats;
}

void write_stats(std::ostream& out, const std::vector<ClipStats>& stats) {
  out << "file\tframes\tfps\tmean_speed\tmean_jerk\tflagged_fraction\t"
         "hist_edges\thist_counts\n";
  char buf[128];
  for (const ClipStats& s : stats) {
    std::snprintf(buf, sizeof(buf), "%zu\t%.6g\t%.6g\t%.6g\t%.6g\t", s.frames,
                  s.frame_rate, s.mean_joint_speed, s.mean_jerk,
                  s.flagged_fraction);
    out << s.file << '\t' << buf;
    for (std::size_t b = 0; b < s.hist_edges.size(); ++b) {
      std::snprintf(buf, sizeof(buf), "%s%.6g", b ? "," : "", s.hist_edges[b]);
      out << buf;
    }
    out << '\t';
    for (std::size_t b = 0; b < s.hist_counts.size(); ++b)
      out << (b ? "," : "") << s.hist_counts[b];
    out << '\n';
  }
}

}  // namespace gesturegen::pipeline
