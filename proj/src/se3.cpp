#include "edgevo/se3.hpp"

#include <cmath>

#include "edgevo/errors.hpp"

namespace edgevo {

namespace {
constexpr double kSmallAngle = 1e-8;
}

bool Pose::is_valid_rotation(double tol) const {
  Mat3 should_be_identity = R.transpose() * R;
  if ((should_be_identity - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(R.determinant() - 1.0) <= tol;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(),
       v.z(), 0, -v.x(),
      -v.y(), v.x(), 0;
  return m;
}

Pose se3_exp(const Twist& xi) {
  const Vec3 rho = xi.head<3>();
  const Vec3 phi = xi.tail<3>();
  const double theta = phi.norm();
  const Mat3 phi_hat = skew(phi);
  const Mat3 phi_hat2 = phi_hat * phi_hat;

  double a, b, c;  // sin t/t, (1-cos t)/t^2, (t-sin t)/t^3
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double t2 = theta * theta;
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / t2;
    c = (theta - std::sin(theta)) / (t2 * theta);
  }

  Pose pose;
  pose.R = Mat3::Identity() + a * phi_hat + b * phi_hat2;
  const Mat3 V = Mat3::Identity() + b * phi_hat + c * phi_hat2;
  pose.t = V * rho;
  return pose;
}

double rotation_angle(const Mat3& R) {
  // two-argument form of acos((tr - 1)/2); exact at the identity and stable
  // at both ends of [0, pi]
  const Vec3 axis_raw(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const double sin_part = 0.5 * axis_raw.norm();
  double cos_part = (R.trace() - 1.0) * 0.5;
  cos_part = std::min(1.0, std::max(-1.0, cos_part));
  return std::atan2(sin_part, cos_part);
}

Twist se3_log(const Pose& pose) {
  const double theta = rotation_angle(pose.R);
  if (theta > M_PI - 1e-6)
    throw Error(ErrorCode::NearPiRotation, "rotation angle too close to pi for a stable log");

  Vec3 phi;
  const Vec3 axis_raw(pose.R(2, 1) - pose.R(1, 2), pose.R(0, 2) - pose.R(2, 0),
                      pose.R(1, 0) - pose.R(0, 1));
  if (theta < kSmallAngle) {
    phi = 0.5 * (1.0 + theta * theta / 6.0) * axis_raw;
  } else {
    phi = theta / (2.0 * std::sin(theta)) * axis_raw;
  }

  const Mat3 phi_hat = skew(phi);
  const Mat3 phi_hat2 = phi_hat * phi_hat;
  double d;  // 1/t^2 - (1+cos t)/(2 t sin t)
  if (theta < kSmallAngle) {
    d = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    d = 1.0 / (theta * theta) - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  const Mat3 V_inv = Mat3::Identity() - 0.5 * phi_hat + d * phi_hat2;

  Twist xi;
  xi.head<3>() = V_inv * pose.t;
  xi.tail<3>() = phi;
  return xi;
}

Eigen::Quaterniond to_quaternion(const Mat3& R) {
  Eigen::Quaterniond q(R);
  return q.normalized();
}

Mat3 from_quaternion(const Eigen::Quaterniond& q) { return q.normalized().toRotationMatrix(); }

}  // namespace edgevo
