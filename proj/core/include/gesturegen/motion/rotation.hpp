#pragma once

#include <Eigen/Core>

#include <array>

#include "gesturegen/motion/skeleton.hpp"

namespace gesturegen::motion {

Eigen::Matrix3d rotation_about(Axis axis, double radians);

// Intrinsic composition in channel order: R = R(order[0]) * R(order[1]) * R(order[2]).
Eigen::Matrix3d euler_to_matrix(const std::array<Axis, 3>& order,
                                const Eigen::Vector3d& radians);

// Inverse of euler_to_matrix for any order of three distinct axes. At gimbal
// lock the third angle is fixed to zero and the first absorbs the remainder.
Eigen::Vector3d matrix_to_euler(const std::array<Axis, 3>& order,
                                const Eigen::Matrix3d& rot);

// Log map with canonical axis-angle output: angle in [0, pi]; at exactly pi
// (where both signs encode the same rotation) the axis sign is fixed so its
// first nonzero component is positive.
Eigen::Vector3d log_rotation(const Eigen::Matrix3d& rot);

Eigen::Matrix3d exp_rotation(const Eigen::Vector3d& expmap);

}  // namespace gesturegen::motion
