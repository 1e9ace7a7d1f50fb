#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace edgevo {

/// Twist ordering: head<3> = translational part rho (meters),
/// tail<3> = rotational part phi (radians, axis*angle).
using Twist = Eigen::Matrix<double, 6, 1>;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Rigid transform: p' = R * p + t.
struct Pose {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 operator*(const Vec3& p) const { return R * p + t; }

  Pose operator*(const Pose& other) const { return {R * other.R, R * other.t + t}; }

  Pose inverse() const {
    Mat3 Rt = R.transpose();
    return {Rt, -(Rt * t)};
  }

  /// RtR = I and det(R) = 1 within `tol`.
  bool is_valid_rotation(double tol = 1e-9) const;
};

Mat3 skew(const Vec3& v);

/// SE(3) exponential map. Small-angle Taylor branch below 1e-8 rad.
Pose se3_exp(const Twist& xi);

/// Inverse of se3_exp. Throws Error{NearPiRotation} when the rotation angle
/// is within 1e-6 of pi.
Twist se3_log(const Pose& pose);

/// Rotation angle of R in radians, in [0, pi].
double rotation_angle(const Mat3& R);

/// Quaternion (x, y, z, w scalar-last) <-> rotation matrix, for trajectory io.
Eigen::Quaterniond to_quaternion(const Mat3& R);
Mat3 from_quaternion(const Eigen::Quaterniond& q);

}  // namespace edgevo
