#pragma once

#include <utility>
#include <vector>

#include "edgevo/dataset.hpp"
#include "edgevo/se3.hpp"

namespace edgevo {

struct MetricReport {
  double rmse = 0;    // translational, m (ATE) or m/s (RPE)
  double mean = 0;
  double median = 0;
  double max = 0;
  double rot_rmse = 0;  // deg/s, RPE only
  int count = 0;
  double dt = 0;  // seconds, RPE only
};

struct MetricSample {
  double timestamp = 0;
  double trans_error = 0;
  double rot_error = 0;  // deg/s, RPE only
};

using PosePairs = std::vector<std::pair<TimedPose, TimedPose>>;

/// Greedy nearest-timestamp pairing within max_dt, each entry used once.
/// Throws Error{NoMatches} when nothing pairs.
PosePairs associate_trajectories(const Trajectory& reference, const Trajectory& estimate,
                                 double max_dt);

struct AlignmentResult {
  Pose transform;  // S minimizing sum ||S * p_i - q_i||^2, no scale
  Trajectory aligned_estimate;
};

/// Least-squares rigid transform between paired positions (rotation +
/// translation, scale fixed at 1). Throws Error{DegenerateGeometry} for
/// fewer than 3 pairs or collinear geometry.
Pose umeyama_align(const std::vector<Vec3>& source, const std::vector<Vec3>& target);
AlignmentResult umeyama_align(const PosePairs& pairs);

/// Relative pose error over a fixed time interval: for each pose with a
/// partner near t + delta (within 0.1 * delta), E = (Qi^-1 Qj)^-1 (Pi^-1 Pj),
/// errors normalized by the actual interval. Throws Error{InsufficientSpan}.
MetricReport rpe(const PosePairs& pairs, double delta_seconds,
                 std::vector<MetricSample>* samples = nullptr);

/// Frame-indexed variant: partner is the pose delta_frames entries ahead.
MetricReport rpe_frames(const PosePairs& pairs, int delta_frames,
                        std::vector<MetricSample>* samples = nullptr);

/// Absolute trajectory error after Umeyama alignment of the estimate onto the
/// reference: ATE_i = ||trans(Qi^-1 S Pi)||.
MetricReport ate(const PosePairs& pairs, std::vector<MetricSample>* samples = nullptr,
                 AlignmentResult* alignment = nullptr);

}  // namespace edgevo
