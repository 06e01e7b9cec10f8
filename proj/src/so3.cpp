#include "headpred/so3.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace headpred {

namespace {

constexpr double kExpSmallAngle = 1e-8;
constexpr double kJacobianSmallAngle = 1e-4;
constexpr double kUnitTolerance = 1e-6;

void require_unit(const Quaternion& q, const char* what) {
  if (std::abs(q.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument(std::string(what) + ": quaternion is not unit norm (|q| = " +
                                std::to_string(q.norm()) + ")");
  }
}

void require_positive_step(double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("integration step must be positive");
  }
}

}  // namespace

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Quaternion Quaternion::canonical() const { return w < 0.0 ? negated() : *this; }

Mat3 Quaternion::to_matrix() const {
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),  //
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),    //
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Mat3 skew(const Eigen::Vector3d& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(),  //
      v.z(), 0, -v.x(),   //
      -v.y(), v.x(), 0;
  return s;
}

Quaternion quat_exp(const RotVec& v) {
  const double theta = v.norm();
  const double half = 0.5 * theta;
  double w;
  double k;  // sin(theta/2) / theta
  if (theta < kExpSmallAngle) {
    const double t2 = theta * theta;
    w = 1.0 - t2 / 8.0;
    k = 0.5 - t2 / 48.0;
  } else {
    w = std::cos(half);
    k = std::sin(half) / theta;
  }
  return Quaternion{w, k * v.x(), k * v.y(), k * v.z()}.normalized().canonical();
}

RotVec quat_log(const Quaternion& q_in) {
  require_unit(q_in, "quat_log");
  const Quaternion q = q_in.normalized().canonical();
  const Eigen::Vector3d u = q.vec();
  const double n = u.norm();
  if (n < kExpSmallAngle) {
    // 2*atan(n/w)/n expanded around n = 0.
    return (2.0 / q.w) * (1.0 - n * n / (3.0 * q.w * q.w)) * u;
  }
  const double angle = 2.0 * std::atan2(n, q.w);
  return (angle / n) * u;
}

double geodesic_distance(const Quaternion& q_pred, const Quaternion& q_true) {
  require_unit(q_pred, "geodesic_distance");
  require_unit(q_true, "geodesic_distance");
  const double angle = quat_log((q_pred * q_true.conjugate()).normalized()).norm();
  return std::min(angle, 2.0 * std::numbers::pi - angle);
}

Quaternion zed(const RotVec& phi) { return quat_exp(phi); }

Quaternion zed12_step(const Quaternion& q, const RotVec& w0, const RotVec& w1, double h) {
  require_positive_step(h);
  const RotVec phi = w0 * h + w1 * (h * h / 2.0);
  return (q * zed(phi)).normalized().canonical();
}

Quaternion zed23_step(const Quaternion& q, const RotVec& w0, const RotVec& w1, const RotVec& w2,
                      double h) {
  require_positive_step(h);
  const double h2 = h * h;
  const double h3 = h2 * h;
  const RotVec phi = w0 * h + w1 * (h2 / 2.0) + w2 * (h3 / 3.0) + w0.cross(w1) * (h3 / 12.0);
  return (q * zed(phi)).normalized().canonical();
}

Mat3 right_jacobian(const RotVec& theta) {
  const double t = theta.norm();
  const Mat3 k = skew(theta);
  if (t < kJacobianSmallAngle) {
    return Mat3::Identity() - 0.5 * k + k * k / 6.0;
  }
  const double t2 = t * t;
  return Mat3::Identity() - (1.0 - std::cos(t)) / t2 * k + (t - std::sin(t)) / (t2 * t) * k * k;
}

Mat3 right_jacobian_inv(const RotVec& theta) {
  const double t = theta.norm();
  if (!(t < std::numbers::pi)) {
    throw std::invalid_argument("right_jacobian_inv: |theta| must be below pi");
  }
  const Mat3 k = skew(theta);
  if (t < kJacobianSmallAngle) {
    return Mat3::Identity() + 0.5 * k + k * k / 12.0;
  }
  const double coeff = 1.0 / (t * t) - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
  return Mat3::Identity() + 0.5 * k + coeff * k * k;
}

}  // namespace headpred
