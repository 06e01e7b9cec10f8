#pragma once

#include <Eigen/Dense>

namespace headpred {

/// Rotation vector in so(3), radians.
using RotVec = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Unit quaternion, scalar-first, Hamilton convention.
///
/// Operations in this header that return a Quaternion canonicalize it to
/// w >= 0 so that q and -q (the same rotation) have one representation.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static Quaternion identity() { return {}; }

  Eigen::Vector3d vec() const { return {x, y, z}; }
  double norm() const;
  double dot(const Quaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }

  Quaternion conjugate() const { return {w, -x, -y, -z}; }
  Quaternion normalized() const;
  Quaternion negated() const { return {-w, -x, -y, -z}; }
  /// Flip to the w >= 0 hemisphere.
  Quaternion canonical() const;

  /// Rotation matrix R such that R*v rotates v by this quaternion.
  Mat3 to_matrix() const;
};

Quaternion operator*(const Quaternion& a, const Quaternion& b);

Mat3 skew(const Eigen::Vector3d& v);

/// Exponential map so(3) -> S^3.
Quaternion quat_exp(const RotVec& v);

/// Logarithm on the w >= 0 branch; |result| lies in [0, pi].
/// Throws std::invalid_argument if |q| deviates from 1 by more than 1e-6.
RotVec quat_log(const Quaternion& q);

/// Smallest rotation angle taking q_true to q_pred, in [0, pi].
double geodesic_distance(const Quaternion& q_pred, const Quaternion& q_true);

/// Norm-preserving rotation-vector-to-quaternion map used by the Zed
/// integrators. Implemented as the exact exponential.
Quaternion zed(const RotVec& phi);

/// One step of the second-order scheme for a linear angular-velocity
/// profile w(t) = w0 + w1*t on [0, h]. w0, w1 are body-frame rates.
Quaternion zed12_step(const Quaternion& q, const RotVec& w0, const RotVec& w1, double h);

/// One step of the third-order scheme for a quadratic profile
/// w(t) = w0 + w1*t + w2*t^2, with the w0 x w1 commutator correction.
/// w2 is the quadratic polynomial coefficient, i.e. half the angular jerk.
Quaternion zed23_step(const Quaternion& q, const RotVec& w0, const RotVec& w1, const RotVec& w2,
                      double h);

/// Right Jacobian of SO(3).
Mat3 right_jacobian(const RotVec& theta);

/// Inverse right Jacobian of SO(3). Requires |theta| < pi.
Mat3 right_jacobian_inv(const RotVec& theta);

}  // namespace headpred
