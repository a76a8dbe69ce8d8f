#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gesturegen/motion/bvh.hpp"
#include "gesturegen/pipeline/config.hpp"

namespace gesturegen::pipeline {

// Objective motion statistics for one clip. The wrist-speed histogram has a
// fixed bin count over [0, max speed]; counts sum to the frame count (frame
// 0 is counted at speed zero).
struct ClipStats {
  std::string file;
  std::size_t frames = 0;
  double frame_rate = 0;
  double mean_joint_speed = 0;
  double mean_jerk = 0;
  double flagged_fraction = 0;
  std::vector<double> hist_edges;        // bin_count + 1 edges
  std::vector<std::size_t> hist_counts;  // bin_count entries
};

constexpr std::size_t kHistogramBins = 10;

// Joint indices whose names contain any of the comma-separated patterns
// (case-insensitive). Falls back to all joints when nothing matches.
std::vector<std::size_t> select_joints(const motion::Skeleton& skeleton,
                                       const std::string& patterns);

ClipStats compute_stats(const std::string& file, const motion::BvhDocument& doc,
                        const PipelineConfig& config);

// TSV: header plus one row per clip; histogram fields are comma-joined.
void write_stats(std::ostream& out, const std::vector<ClipStats>& stats);

}  // namespace gesturegen::pipeline
