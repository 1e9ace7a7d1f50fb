#include "edgevo/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "edgevo/errors.hpp"

namespace edgevo {

namespace {
constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr std::size_t kReductionBlock = 256;
// Weighted costs below this are pure floating-point residue of exact
// alignment (mean residual ~1e-10 px); there is nothing left to optimize.
constexpr double kCostFloor = 1e-16;
}  // namespace

void RobustConfig::validate() const {
  if (!(lambda_init > 0) || !(lambda_up > 1) || !(lambda_down > 0) || !(lambda_down < 1))
    throw Error(ErrorCode::ConfigError, "LM lambda schedule requires up > 1 > down > 0");
  if (max_iters_per_level < 1 || !(step_tol > 0) || !(cost_tol > 0) || !(lambda_max > 0))
    throw Error(ErrorCode::ConfigError, "LM tolerances must be positive");
}

void KeyframePolicy::validate() const {
  if (period < 1 || !(trans_threshold > 0) || !(rot_threshold > 0))
    throw Error(ErrorCode::ConfigError, "keyframe policy thresholds must be positive");
}

double ResidualReport::mean_residual() const {
  if (residuals.empty()) return 0;
  double sum = 0;
  for (double r : residuals) sum += r;
  return sum / residuals.size();
}

std::vector<double> huber_weights(std::span<const double> residuals, double huber_theta) {
  if (!(huber_theta > 0)) throw Error(ErrorCode::ConfigError, "huber theta must be positive");
  std::vector<double> weights(residuals.size());
  for (size_t i = 0; i < residuals.size(); ++i)
    weights[i] = residuals[i] <= huber_theta ? 1.0 : huber_theta / residuals[i];
  return weights;
}

double robust_scale(std::span<const double> residuals) {
  if (residuals.empty()) throw Error(ErrorCode::EmptyResiduals, "robust scale of nothing");
  std::vector<double> work(residuals.begin(), residuals.end());
  const auto median_of = [](std::vector<double>& v) {
    const size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
      const double lower = *std::max_element(v.begin(), v.begin() + mid);
      m = 0.5 * (m + lower);
    }
    return m;
  };
  const double med = median_of(work);
  for (double& v : work) v = std::abs(v - med);
  const double mad = median_of(work);
  return std::max(0.5, 1.345 * 1.4826 * mad);
}

namespace {

struct PointTerm {
  bool valid = false;
  double r = 0;
  double w = 1;
  Vec6 jacobian = Vec6::Zero();
};

/// Residual (and optionally its twist Jacobian) of one keyframe point under
/// cur_from_key. The Jacobian chains the interpolated field gradient with the
/// projection derivative and the left-multiplicative SE(3) generator [I | -p^].
inline PointTerm evaluate_point(const Vec3& point, const Pose& cur_from_key,
                                const DistanceField& field, const CameraIntrinsics& k,
                                double huber_theta, bool with_jacobian) {
  PointTerm term;
  const Vec3 p = cur_from_key * point;
  if (p.z() <= kMinProjectionDepth) return term;
  const double inv_z = 1.0 / p.z();
  const double u = k.fx * p.x() * inv_z + k.cx;
  const double v = k.fy * p.y() * inv_z + k.cy;
  const auto sample = field.sample_bilinear(u, v);
  if (!sample) return term;

  term.valid = true;
  term.r = sample->dist;
  term.w = term.r <= huber_theta ? 1.0 : huber_theta / term.r;
  if (with_jacobian) {
    const double a = sample->grad_x * k.fx * inv_z;
    const double b = sample->grad_y * k.fy * inv_z;
    const double c = -(sample->grad_x * k.fx * p.x() + sample->grad_y * k.fy * p.y()) * inv_z *
                     inv_z;
    term.jacobian[0] = a;
    term.jacobian[1] = b;
    term.jacobian[2] = c;
    term.jacobian[3] = -b * p.z() + c * p.y();
    term.jacobian[4] = a * p.z() - c * p.x();
    term.jacobian[5] = -a * p.y() + b * p.x();
  }
  return term;
}

struct NormalEquations {
  Mat6 H = Mat6::Zero();
  Vec6 g = Vec6::Zero();
  double cost = 0;
  int valid = 0;
};

/// Deterministic reduction: fixed-size blocks are summed serially and
/// combined in block order, so Serial and Parallel agree bitwise.
NormalEquations accumulate(std::span<const Vec3> points, const Pose& cur_from_key,
                           const DistanceField& field, const CameraIntrinsics& k,
                           double huber_theta, bool with_jacobian, ExecMode mode) {
  const int n_blocks = reduction_block_count(points.size(), kReductionBlock);
  std::vector<NormalEquations> partial(n_blocks);
  parallel_for(n_blocks, mode, [&](int b) {
    NormalEquations& ne = partial[b];
    const size_t begin = static_cast<size_t>(b) * kReductionBlock;
    const size_t end = std::min(points.size(), begin + kReductionBlock);
    for (size_t i = begin; i < end; ++i) {
      const PointTerm term =
          evaluate_point(points[i], cur_from_key, field, k, huber_theta, with_jacobian);
      if (!term.valid) continue;
      ne.cost += term.w * term.r * term.r;
      ++ne.valid;
      if (with_jacobian) {
        ne.H.noalias() += term.w * term.jacobian * term.jacobian.transpose();
        ne.g.noalias() += term.w * term.r * term.jacobian;
      }
    }
  });
  NormalEquations total;
  for (const NormalEquations& ne : partial) {
    total.H += ne.H;
    total.g += ne.g;
    total.cost += ne.cost;
    total.valid += ne.valid;
  }
  return total;
}

}  // namespace

NormalEquationsView normal_equations(std::span<const Vec3> points, const Pose& cur_from_key,
                                     const DistanceField& field,
                                     const CameraIntrinsics& intrinsics, double huber_theta,
                                     ExecMode mode) {
  const NormalEquations ne =
      accumulate(points, cur_from_key, field, intrinsics, huber_theta, true, mode);
  return {ne.H, ne.g, ne.cost, ne.valid};
}

ResidualReport compute_residuals(std::span<const Vec3> points, const Pose& cur_from_key,
                                 const DistanceField& field, const CameraIntrinsics& intrinsics,
                                 double huber_theta) {
  ResidualReport report;
  report.total = static_cast<int>(points.size());
  for (const Vec3& point : points) {
    const PointTerm term = evaluate_point(point, cur_from_key, field, intrinsics, huber_theta,
                                          /*with_jacobian=*/false);
    if (!term.valid) continue;
    report.residuals.push_back(term.r);
    report.weights.push_back(term.w);
    report.cost += term.w * term.r * term.r;
  }
  report.valid = static_cast<int>(report.residuals.size());
  if (report.valid == 0)
    throw Error(ErrorCode::NoValidPoints, "every point fell outside the distance field");
  return report;
}

LevelResult lm_solve_level(std::span<const Vec3> points, const Twist& xi0,
                           const DistanceField& field, const CameraIntrinsics& intrinsics,
                           const RobustConfig& config, ExecMode mode) {
  config.validate();
  LevelResult result;
  result.xi = xi0;
  result.report.total = static_cast<int>(points.size());

  Pose pose = se3_exp(xi0);

  // Fix the Huber scale from the residuals at entry; weights are recomputed
  // from it every iteration.
  double theta = config.huber_theta;
  try {
    ResidualReport initial = compute_residuals(points, pose, field, intrinsics, kInfinity);
    if (theta <= 0) theta = robust_scale(initial.residuals);
  } catch (const Error&) {
    result.stats.status = LevelStatus::NoValidPoints;
    return result;
  }
  result.stats.huber_theta = theta;

  NormalEquations ne = accumulate(points, pose, field, intrinsics, theta, true, mode);
  result.stats.initial_cost = ne.cost;
  result.stats.final_cost = ne.cost;

  if (ne.valid < 6) {
    result.stats.status = LevelStatus::SingularNormalEquations;
    return result;
  }
  if (ne.cost <= kCostFloor) {
    result.stats.status = LevelStatus::Converged;
    result.report = compute_residuals(points, pose, field, intrinsics, theta);
    return result;
  }

  double lambda = config.lambda_init;
  result.stats.status = LevelStatus::MaxIterations;
  while (result.stats.iterations < config.max_iters_per_level) {
    ++result.stats.iterations;

    Mat6 damped = ne.H;
    for (int i = 0; i < 6; ++i)
      damped(i, i) += lambda * std::max(ne.H(i, i), 1e-12);
    const Eigen::LDLT<Mat6> solver(damped);
    Vec6 delta = Vec6::Zero();
    bool solvable = solver.info() == Eigen::Success;
    if (solvable) {
      delta = solver.solve(-ne.g);
      solvable = delta.allFinite();
    }

    bool accepted = false;
    if (solvable) {
      const Pose trial = se3_exp(delta) * pose;
      const NormalEquations trial_ne =
          accumulate(points, trial, field, intrinsics, theta, true, mode);
      if (trial_ne.valid >= 6 && std::isfinite(trial_ne.cost) && trial_ne.cost < ne.cost) {
        accepted = true;
        ++result.stats.accepted;
        const double previous_cost = ne.cost;
        pose = trial;
        ne = trial_ne;
        result.stats.final_cost = ne.cost;
        lambda = std::max(lambda * config.lambda_down, 1e-12);
        if (delta.norm() < config.step_tol ||
            previous_cost - ne.cost < config.cost_tol * std::max(previous_cost, 1e-300) ||
            ne.cost <= kCostFloor) {
          result.stats.status = LevelStatus::Converged;
          break;
        }
      }
    }
    if (!accepted) {
      lambda *= config.lambda_up;
      if (lambda > config.lambda_max) {
        result.stats.status = result.stats.accepted == 0 ? LevelStatus::Diverged
                                                         : LevelStatus::Converged;
        break;
      }
    }
  }

  if (result.stats.ok()) {
    if (result.stats.accepted > 0) {
      try {
        result.xi = se3_log(pose);
      } catch (const Error&) {
        result.stats.status = LevelStatus::Diverged;  // solve wandered near the pi singularity
        result.xi = xi0;
        return result;
      }
    }
    try {
      result.report = compute_residuals(points, pose, field, intrinsics, theta);
    } catch (const Error&) {
      result.report.valid = 0;
    }
  }
  return result;
}

Keyframe sample_keyframe_points(const std::vector<PyramidLevel>& pyramid, int frame_index,
                                double timestamp, const Pose& world_pose, int max_points_level0,
                                int min_points_per_level) {
  Keyframe kf;
  kf.frame_index = frame_index;
  kf.timestamp = timestamp;
  kf.world_pose = world_pose;
  kf.level_points.resize(pyramid.size());

  for (size_t l = 0; l < pyramid.size(); ++l) {
    const PyramidLevel& level = pyramid[l];
    std::vector<std::pair<int, int>> pixels;
    for (int y = 0; y < level.edges.height(); ++y)
      for (int x = 0; x < level.edges.width(); ++x)
        if (level.edges.is_edge(x, y) && level.depth.at(x, y) > 0) pixels.emplace_back(x, y);

    if (static_cast<int>(pixels.size()) < min_points_per_level)
      throw Error(ErrorCode::TooFewPoints,
                  "level " + std::to_string(l) + " has only " + std::to_string(pixels.size()) +
                      " edge points with depth");

    const int cap = std::max(min_points_per_level, max_points_level0 >> l);
    std::vector<Vec3>& points = kf.level_points[l];
    if (static_cast<int>(pixels.size()) > cap) {
      const double stride = static_cast<double>(pixels.size()) / cap;
      points.reserve(cap);
      for (int i = 0; i < cap; ++i) {
        const auto& [x, y] = pixels[static_cast<size_t>(i * stride)];
        points.push_back(backproject(x, y, level.depth.at(x, y), level.intrinsics));
      }
    } else {
      points.reserve(pixels.size());
      for (const auto& [x, y] : pixels)
        points.push_back(backproject(x, y, level.depth.at(x, y), level.intrinsics));
    }
  }
  return kf;
}

AlignResult align_coarse_to_fine(const Keyframe& keyframe,
                                 const std::vector<PyramidLevel>& current, const Twist& xi0,
                                 const RobustConfig& config, ExecMode mode) {
  if (keyframe.level_points.size() != current.size())
    throw Error(ErrorCode::DimensionMismatch, "keyframe and current pyramids differ in depth");

  AlignResult result;
  result.xi = xi0;
  for (int l = static_cast<int>(current.size()) - 1; l >= 0; --l) {
    LevelResult level = lm_solve_level(keyframe.level_points[l], result.xi, current[l].dist,
                                       current[l].intrinsics, config, mode);
    result.levels.push_back(level.stats);
    result.level_indices.push_back(l);
    if (level.stats.ok()) {
      result.xi = level.xi;  // a failed level keeps the incoming estimate
      result.ok = true;
    }
    if (l == 0) {
      result.valid_ratio = level.report.valid_ratio();
      result.final_mean_residual = level.report.mean_residual();
    }
  }
  return result;
}

bool keyframe_decision(int frame_index, int keyframe_index, const Twist& xi_kc,
                       const KeyframePolicy& policy) {
  if (frame_index - keyframe_index >= policy.period) return true;
  if (xi_kc.head<3>().norm() > policy.trans_threshold) return true;
  return xi_kc.tail<3>().norm() > policy.rot_threshold;
}

TrackResult track_sequence(const FrameStream& frames, const EdgeSourceFn& edge_source,
                           const CameraIntrinsics& intrinsics, const TrackerConfig& config,
                           ExecMode mode) {
  config.robust.validate();
  config.keyframe.validate();
  config.corner.validate();
  intrinsics.validate();

  TrackResult result;
  Keyframe keyframe;
  bool have_keyframe = false;
  Pose world_prev;                 // camera-to-world of the previous frame
  Pose motion = Pose::identity();  // T(prev <- prev-1), constant-velocity model
  Pose prev_from_key = Pose::identity();

  int index = 0;
  while (auto maybe_frame = frames()) {
    const Frame frame = std::move(*maybe_frame);
    FrameDiagnostics diag;
    diag.index = index;
    diag.timestamp = frame.timestamp;

    EdgeMap raw_edges = edge_source(frame, index);
    if (raw_edges.width() != intrinsics.width || raw_edges.height() != intrinsics.height)
      throw Error(ErrorCode::DimensionMismatch, "edge map does not match frame dimensions");

    std::vector<PyramidLevel> pyramid;
    bool frame_usable = true;
    try {
      const CornerOptimization opt = corner_optimize(raw_edges, config.corner, mode);
      pyramid = build_pyramid(frame, opt.augmented, intrinsics, config.pyramid_levels, mode);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoEdgePixels) throw;
      frame_usable = false;
    }

    if (!have_keyframe) {
      if (!frame_usable)
        throw Error(ErrorCode::TrackingLost, "first frame has no edge pixels");
      keyframe = sample_keyframe_points(pyramid, index, frame.timestamp, Pose::identity(),
                                        config.max_points_level0, config.min_points_per_level);
      have_keyframe = true;
      world_prev = Pose::identity();
      diag.keyframe = true;
      diag.valid_ratio = 1.0;
      result.trajectory.push_back({frame.timestamp, Pose::identity()});
      result.diagnostics.push_back(std::move(diag));
      ++index;
      continue;
    }

    Twist xi0 = Twist::Zero();
    if (keyframe.frame_index != index - 1) {
      try {
        xi0 = se3_log(motion * prev_from_key);  // cur_from_key prediction
      } catch (const Error&) {
        xi0 = Twist::Zero();
      }
    }

    Pose cur_from_key;
    Pose world_cur;
    bool aligned = false;
    if (frame_usable) {
      AlignResult align = align_coarse_to_fine(keyframe, pyramid, xi0, config.robust, mode);
      diag.valid_ratio = align.valid_ratio;
      diag.final_cost = 0;
      for (const LevelStats& stats : align.levels)
        diag.iterations_per_level.push_back(stats.iterations);
      if (!align.levels.empty()) diag.final_cost = align.levels.back().final_cost;
      if (align.ok) {
        aligned = true;
        cur_from_key = se3_exp(align.xi);
        world_cur = keyframe.world_pose * cur_from_key.inverse();
      }
    }
    if (!aligned) {
      world_cur = world_prev * motion.inverse();  // constant-velocity dead reckoning
      cur_from_key = world_cur.inverse() * keyframe.world_pose;
      diag.lost = diag.valid_ratio < config.min_valid_ratio;
    }

    motion = cur_from_key * prev_from_key.inverse();

    bool promote = false;
    try {
      const Twist xi_kc = se3_log(cur_from_key);
      promote = keyframe_decision(index, keyframe.frame_index, xi_kc, config.keyframe);
    } catch (const Error&) {
      promote = true;  // beyond-pi motion: certainly past any amplitude threshold
    }
    if (!aligned) promote = frame_usable;  // re-anchor after a failure when possible

    if (promote && frame_usable) {
      try {
        keyframe = sample_keyframe_points(pyramid, index, frame.timestamp, world_cur,
                                          config.max_points_level0, config.min_points_per_level);
        prev_from_key = Pose::identity();
        diag.keyframe = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooFewPoints) throw;
        prev_from_key = cur_from_key;
      }
    } else {
      prev_from_key = cur_from_key;
    }

    world_prev = world_cur;
    result.trajectory.push_back({frame.timestamp, world_cur});
    result.diagnostics.push_back(std::move(diag));
    ++index;
  }

  if (result.trajectory.empty())
    throw Error(ErrorCode::EmptyInput, "frame stream produced no frames");
  return result;
}

}  // namespace edgevo
