#pragma once

#include <Eigen/Core>

namespace gesturegen {

// Row-major everywhere: frame matrices are serialized row by row (one row per
// frame) and most loops walk frames in time order.
using MatrixRM =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace gesturegen
