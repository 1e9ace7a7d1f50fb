#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "edgevo/camera.hpp"
#include "edgevo/corner.hpp"
#include "edgevo/dataset.hpp"
#include "edgevo/distance_transform.hpp"
#include "edgevo/pyramid.hpp"
#include "edgevo/se3.hpp"

namespace edgevo {

struct RobustConfig {
  double huber_theta = 0.0;  // pixels; <= 0 selects the MAD-based auto scale
  double lambda_init = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 0.5;
  double lambda_max = 1e8;
  int max_iters_per_level = 50;
  double step_tol = 1e-7;
  double cost_tol = 1e-8;

  void validate() const;
};

struct KeyframePolicy {
  int period = 5;                         // frames
  double trans_threshold = 0.15;          // meters
  double rot_threshold = 0.17453292519943295;  // radians (10 degrees)

  void validate() const;
};

struct TrackerConfig {
  RobustConfig robust;
  KeyframePolicy keyframe;
  CornerConfig corner;
  int pyramid_levels = 4;
  int max_points_level0 = 4000;
  int min_points_per_level = 50;
  double min_valid_ratio = 0.10;  // below this an all-level failure counts as lost
};

struct ResidualReport {
  std::vector<double> residuals;  // per tracked point, pixels
  std::vector<double> weights;
  int valid = 0;   // residuals.size()
  int total = 0;   // points attempted
  double cost = 0; // sum w * r^2

  double mean_residual() const;
  double valid_ratio() const { return total > 0 ? static_cast<double>(valid) / total : 0.0; }
};

/// Reproject keyframe points with cur_from_key and sample the distance field.
/// Behind-camera and out-of-bounds points are dropped, not penalized.
/// Weights are Huber with the given theta (infinity -> unit weights).
/// Throws Error{NoValidPoints} when every point drops out.
ResidualReport compute_residuals(std::span<const Vec3> points, const Pose& cur_from_key,
                                 const DistanceField& field, const CameraIntrinsics& intrinsics,
                                 double huber_theta);

/// w = 1 for r <= theta, theta / r above.
std::vector<double> huber_weights(std::span<const double> residuals, double huber_theta);

/// Gauss-Newton normal equations of the weighted edge-distance cost:
/// H = sum w J^T J, g = sum w r J with the analytic twist Jacobian J.
/// The gradient of the frozen-weight cost at this pose is 2 g.
struct NormalEquationsView {
  Mat6 H = Mat6::Zero();
  Vec6 g = Vec6::Zero();
  double cost = 0;
  int valid = 0;
};
NormalEquationsView normal_equations(std::span<const Vec3> points, const Pose& cur_from_key,
                                     const DistanceField& field,
                                     const CameraIntrinsics& intrinsics, double huber_theta,
                                     ExecMode mode = ExecMode::Parallel);

/// theta = max(0.5 px, 1.345 * 1.4826 * MAD). Throws Error{EmptyResiduals}.
double robust_scale(std::span<const double> residuals);

enum class LevelStatus {
  Converged,
  MaxIterations,
  NoValidPoints,
  SingularNormalEquations,
  Diverged,
};

struct LevelStats {
  LevelStatus status = LevelStatus::Converged;
  int iterations = 0;  // LM iterations attempted
  int accepted = 0;
  double initial_cost = 0;
  double final_cost = 0;
  double huber_theta = 0;

  bool ok() const {
    return status == LevelStatus::Converged || status == LevelStatus::MaxIterations;
  }
};

struct LevelResult {
  Twist xi = Twist::Zero();
  ResidualReport report;
  LevelStats stats;
};

/// Huber-weighted Levenberg-Marquardt over one pyramid level. The pose update
/// is left-multiplicative (xi <- log(exp(delta) * exp(xi))); a step is
/// accepted only if the weighted cost decreases, so the accepted-step cost
/// sequence is non-increasing. The Huber scale is fixed on entry (auto mode
/// uses robust_scale of the initial residuals); weights are recomputed from
/// it each iteration.
LevelResult lm_solve_level(std::span<const Vec3> points, const Twist& xi0,
                           const DistanceField& field, const CameraIntrinsics& intrinsics,
                           const RobustConfig& config, ExecMode mode = ExecMode::Parallel);

struct Keyframe {
  int frame_index = 0;
  double timestamp = 0;
  Pose world_pose;  // camera-to-world
  std::vector<std::vector<Vec3>> level_points;  // camera coords per pyramid level
};

/// Collect edge pixels with valid depth at every pyramid level and backproject
/// them with that level's intrinsics. Levels are capped at
/// max(min_points, max_points_level0 >> level) by deterministic stride
/// subsampling. Throws Error{TooFewPoints} if any level has < min_points.
Keyframe sample_keyframe_points(const std::vector<PyramidLevel>& pyramid, int frame_index,
                                double timestamp, const Pose& world_pose, int max_points_level0,
                                int min_points_per_level);

struct AlignResult {
  Twist xi = Twist::Zero();  // cur_from_key
  bool ok = false;           // at least one level succeeded
  std::vector<LevelStats> levels;      // coarsest first, in solve order
  std::vector<int> level_indices;      // pyramid level of each entry
  double valid_ratio = 0;              // finest attempted level
  double final_mean_residual = 0;
};

/// Coarse-to-fine alignment: each level starts from the previous level's
/// estimate (the twist is scale-free; only intrinsics change). A failed level
/// falls back to its incoming estimate and the next finer level continues.
AlignResult align_coarse_to_fine(const Keyframe& keyframe,
                                 const std::vector<PyramidLevel>& current, const Twist& xi0,
                                 const RobustConfig& config, ExecMode mode = ExecMode::Parallel);

/// Dual keyframe mechanism: promote when the frame gap reaches the period or
/// either motion amplitude exceeds its threshold.
bool keyframe_decision(int frame_index, int keyframe_index, const Twist& xi_kc,
                       const KeyframePolicy& policy);

struct FrameDiagnostics {
  int index = 0;
  double timestamp = 0;
  double valid_ratio = 0;
  double final_cost = 0;
  std::vector<int> iterations_per_level;  // coarsest first
  bool keyframe = false;
  bool lost = false;
};

struct TrackResult {
  Trajectory trajectory;
  std::vector<FrameDiagnostics> diagnostics;
};

using FrameStream = std::function<std::optional<Frame>()>;
using EdgeSourceFn = std::function<EdgeMap(const Frame&, int index)>;

/// Full VO pipeline: per frame, edge map -> corner optimization -> augmented
/// mask -> pyramid with distance fields -> LM alignment against the current
/// keyframe (constant-velocity initialization) -> keyframe update. The first
/// frame becomes the first keyframe at world identity. On an all-level
/// alignment failure the pose falls back to the constant-velocity prediction;
/// it is flagged lost when the valid-point ratio is also below
/// min_valid_ratio. Throws Error{TrackingLost} only if the first frame cannot
/// be made a keyframe.
TrackResult track_sequence(const FrameStream& frames, const EdgeSourceFn& edge_source,
                           const CameraIntrinsics& intrinsics, const TrackerConfig& config,
                           ExecMode mode = ExecMode::Parallel);

}  // namespace edgevo
