#pragma once

#include <Eigen/Dense>

#include <span>

#include "headpred/so3.hpp"

namespace headpred {

/// Euclidean distance in millimeters between positions given in meters.
double position_error(const Eigen::Vector3d& p_pred, const Eigen::Vector3d& p_true);

/// Geodesic angle between two orientations, in degrees within [0, 180].
double orientation_error(const Quaternion& q_pred, const Quaternion& q_true);

struct SummaryStats {
  double median = 0.0;
  double mean = 0.0;
  double ci_low = 0.0;   // Student-t interval on the mean
  double ci_high = 0.0;
  std::size_t n = 0;
  double level = 0.95;
};

/// Median, mean and a two-sided Student-t confidence interval for the mean
/// with n - 1 degrees of freedom. For n = 1 the interval collapses to the
/// mean. Throws std::invalid_argument on empty input or level outside (0, 1).
SummaryStats summarize(std::span<const double> samples, double level = 0.95);

}  // namespace headpred
