#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gesturegen/motion/kinematics.hpp"

namespace gesturegen::motion {

struct AnomalyFlag {
  std::size_t frame = 0;
  std::string joint;
  double speed = 0;
  double median = 0;
  double score = 0;  // |speed - median| / (1.4826 * MAD)
};

// Sorted by frame index; flagged frames are always within [0, frame count).
struct AnomalyReport {
  std::vector<AnomalyFlag> flags;
  std::size_t frames_checked = 0;

  // Fraction of distinct frames carrying at least one flag.
  double flagged_fraction() const;
};

// Hampel outlier detection on per-joint speeds. The speed at frame t is
// ||pos_t - pos_{t-1}|| * rate (t >= 1). Frame t is flagged when its speed
// deviates from the rolling window median by more than
// threshold * 1.4826 * MAD, with the MAD floored at mad_floor so a spike in
// an otherwise constant window still trips. Windows are centered and
// truncated at the sequence boundaries.
//
// Requires an odd window and window < frame count.
AnomalyReport detect_speed_anomalies(const JointPositions& positions,
                                     const std::vector<std::size_t>& joints,
                                     std::size_t window, double threshold,
                                     double mad_floor = 1e-9);

// One line per flag: file<TAB>frame<TAB>joint<TAB>speed<TAB>median<TAB>score
void write_anomaly_report(std::ostream& out, const std::string& file,
                          const AnomalyReport& report);

}  // namespace gesturegen::motion
