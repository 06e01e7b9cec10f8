#pragma once

#include <Eigen/Dense>

#include "headpred/so3.hpp"

namespace headpred {

/// Timestamped 6-DoF head pose. Position in meters, t in seconds.
struct Pose {
  double t = 0.0;
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  Quaternion q;
};

}  // namespace headpred
