#pragma once

#include <Eigen/Core>

#include <memory>
#include <vector>

#include "gesturegen/common/matrix.hpp"
#include "gesturegen/motion/bvh.hpp"
#include "gesturegen/motion/skeleton.hpp"

namespace gesturegen::motion {

// Pose features for the generative model: per frame, one exponential-map
// 3-vector per joint measured relative to a reference pose, optionally
// followed by 3 root-translation values. Every expmap vector is canonical
// (magnitude <= pi).
struct PoseSequence {
  double frame_rate = 30.0;
  MatrixRM frames;  // T x D, D = 3*J (+3 with root translation)
  std::shared_ptr<const Skeleton> skeleton;
  bool has_root_translation = false;

  std::size_t frame_count() const { return static_cast<std::size_t>(frames.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(frames.cols()); }
  std::size_t expected_dim() const {
    return 3 * skeleton->joint_count() + (has_root_translation ? 3 : 0);
  }
  void validate() const;
};

// Reference rotations, one per joint. Empty means identity (the default
// T-pose). load_reference_pose takes them from the first frame of a BVH.
using ReferencePose = std::vector<Eigen::Matrix3d>;
ReferencePose load_reference_pose(const std::string& bvh_path);

PoseSequence to_expmap(const BvhDocument& doc,
                       const ReferencePose& tpose = {},
                       bool include_root_translation = false);

// Inverse mapping; reconstructs native Euler channels (degrees) against the
// same reference pose. Root position channels are filled from the pose's
// translation columns when present, else zero.
BvhDocument from_expmap(const PoseSequence& pose,
                        const ReferencePose& tpose = {});

}  // namespace gesturegen::motion
