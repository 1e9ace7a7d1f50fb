#pragma once

#include <optional>

#include "edgevo/errors.hpp"
#include "edgevo/se3.hpp"

namespace edgevo {

inline constexpr double kMinProjectionDepth = 1e-6;  // meters

struct CameraIntrinsics {
  double fx = 0, fy = 0;
  double cx = 0, cy = 0;
  int width = 0, height = 0;
  double depth_scale = 5000.0;  // raw depth units per meter

  void validate() const {
    if (!(fx > 0) || !(fy > 0)) throw Error(ErrorCode::ConfigError, "focal lengths must be positive");
    if (!(cx > 0 && cx < width) || !(cy > 0 && cy < height))
      throw Error(ErrorCode::ConfigError, "principal point must lie inside the image");
    if (!(depth_scale > 0)) throw Error(ErrorCode::ConfigError, "depth_scale must be positive");
  }

  /// Intrinsics of the next pyramid level (all four parameters halved,
  /// dimensions by ceil).
  CameraIntrinsics halved() const {
    CameraIntrinsics k = *this;
    k.fx *= 0.5;
    k.fy *= 0.5;
    k.cx *= 0.5;
    k.cy *= 0.5;
    k.width = (width + 1) / 2;
    k.height = (height + 1) / 2;
    return k;
  }
};

/// Pinhole projection. Empty when z <= kMinProjectionDepth (behind camera).
inline std::optional<Vec2> project(const Vec3& p, const CameraIntrinsics& k) {
  if (p.z() <= kMinProjectionDepth) return std::nullopt;
  return Vec2(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
}

/// Inverse of project given the depth of the pixel. Throws on d <= 0.
inline Vec3 backproject(double u, double v, double d, const CameraIntrinsics& k) {
  if (!(d > 0)) throw Error(ErrorCode::InvalidDepth, "depth must be positive");
  return Vec3((u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d);
}

}  // namespace edgevo
