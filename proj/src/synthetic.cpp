#include "edgevo/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "edgevo/errors.hpp"

namespace edgevo {

namespace {
constexpr double kNearClip = 0.05;  // meters
}

WireScene make_cube_scene(double edge_length, const Vec3& center, bool face_diagonals) {
  const double h = edge_length / 2;
  std::vector<Vec3> corners;
  for (int i = 0; i < 8; ++i)
    corners.push_back(center + Vec3((i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h));

  WireScene scene;
  const int edges[12][2] = {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {1, 3},
                            {4, 6}, {5, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  for (const auto& e : edges) scene.segments.emplace_back(corners[e[0]], corners[e[1]]);
  if (face_diagonals) {
    // front face (smaller z): corners 0,1,2,3
    scene.segments.emplace_back(corners[0], corners[3]);
    scene.segments.emplace_back(corners[1], corners[2]);
  }
  return scene;
}

void add_ladder(WireScene& scene, double x0, double x1, double y0, int rungs, double spacing,
                double z) {
  for (int i = 0; i < rungs; ++i) {
    const double y = y0 + i * spacing;
    scene.segments.emplace_back(Vec3(x0, y, z), Vec3(x1, y, z));
  }
}

std::vector<Pose> make_wobble_path(int n_frames, double trans_step, double rot_step) {
  std::vector<Pose> path;
  path.reserve(n_frames);
  Pose pose = Pose::identity();
  for (int i = 0; i < n_frames; ++i) {
    path.push_back(pose);
    Vec3 dir_t(std::cos(2 * M_PI * i / 61.0), 0.6 * std::sin(2 * M_PI * i / 61.0),
               0.35 * std::sin(2 * M_PI * i / 97.0));
    Vec3 dir_r(std::sin(2 * M_PI * i / 83.0), std::cos(2 * M_PI * i / 71.0),
               0.5 * std::sin(2 * M_PI * i / 53.0));
    Twist step;
    step.head<3>() = trans_step * dir_t.normalized();
    step.tail<3>() = rot_step * dir_r.normalized();
    pose = pose * se3_exp(step);
  }
  return path;
}

namespace {

/// Closest approach between the pixel-center ray tau*d and the segment
/// a + s*(b - a); returns the ray depth tau (= z, since d.z = 1), or nothing
/// for a degenerate/behind configuration.
std::optional<double> ray_segment_depth(const Vec3& d, const Vec3& a, const Vec3& b) {
  const Vec3 e = b - a;
  const double ee = e.dot(e);
  const double dd = d.dot(d);
  const double ed = e.dot(d);
  const double det = ee * dd - ed * ed;
  double s;
  if (det < 1e-12 * ee * dd || ee < 1e-18) {
    s = 0.0;  // ray nearly parallel to the segment, or point segment
  } else {
    s = (-a.dot(e) * dd + a.dot(d) * ed) / det;
    s = std::clamp(s, 0.0, 1.0);
  }
  const double tau = d.dot(a + s * e) / dd;
  if (tau <= kNearClip) return std::nullopt;
  return tau;
}

}  // namespace

SyntheticSequence generate_synthetic_sequence(const WireScene& scene,
                                              const std::vector<Pose>& camera_in_world,
                                              const CameraIntrinsics& intrinsics,
                                              const SyntheticOptions& options) {
  if (scene.segments.empty()) throw Error(ErrorCode::SceneNotVisible, "scene has no segments");
  intrinsics.validate();

  const int width = intrinsics.width;
  const int height = intrinsics.height;
  const int band = std::max(0, options.surface_patch_radius);

  SyntheticSequence sequence;
  sequence.frames.reserve(camera_in_world.size());
  for (size_t frame_idx = 0; frame_idx < camera_in_world.size(); ++frame_idx) {
    const Pose cam_from_world = camera_in_world[frame_idx].inverse();
    std::mt19937_64 rng(options.seed + frame_idx);
    std::normal_distribution<double> jitter(0.0, options.edge_jitter_sigma);

    SyntheticFrame synth;
    synth.edges = EdgeMap(width, height, EdgeSource::External);
    synth.frame.timestamp = frame_idx / options.fps;
    synth.frame.intensity = ImageF(width, height, 1.f);
    synth.frame.depth = ImageF(width, height, 0.f);

    for (const auto& [wa, wb] : scene.segments) {
      Vec3 a = cam_from_world * wa;
      Vec3 b = cam_from_world * wb;
      if (a.z() <= kNearClip && b.z() <= kNearClip) continue;
      // clip to the near plane
      if (a.z() <= kNearClip || b.z() <= kNearClip) {
        const double t = (kNearClip * 1.01 - a.z()) / (b.z() - a.z());
        if (a.z() <= kNearClip)
          a = a + t * (b - a);
        else
          b = a + t * (b - a);
      }
      const auto pa = project(a, intrinsics);
      const auto pb = project(b, intrinsics);
      if (!pa || !pb) continue;
      const double len_px = (*pb - *pa).norm();
      const int steps = std::clamp(static_cast<int>(std::ceil(len_px / 0.3)), 1, 20000);

      for (int s = 0; s <= steps; ++s) {
        const Vec3 p = a + (static_cast<double>(s) / steps) * (b - a);
        const auto uv = project(p, intrinsics);
        if (!uv) continue;
        double u = uv->x();
        double v = uv->y();
        if (options.edge_jitter_sigma > 0) {
          u += jitter(rng);
          v += jitter(rng);
        }
        const int px = static_cast<int>(std::lround(u));
        const int py = static_cast<int>(std::lround(v));
        if (px < 0 || px >= width || py < 0 || py >= height) continue;
        synth.edges.set(px, py);
        synth.frame.intensity.at(px, py) = 0.f;

        // depth band: exact pixel-ray depths on and around the segment
        for (int ny = py - band; ny <= py + band; ++ny) {
          for (int nx = px - band; nx <= px + band; ++nx) {
            if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
            const Vec3 ray((nx - intrinsics.cx) / intrinsics.fx,
                           (ny - intrinsics.cy) / intrinsics.fy, 1.0);
            const auto depth = ray_segment_depth(ray, a, b);
            if (!depth) continue;
            float& cell = synth.frame.depth.at(nx, ny);
            if (cell == 0.f || static_cast<float>(*depth) < cell)
              cell = static_cast<float>(*depth);
          }
        }
      }
    }

    if (synth.edges.edge_count() == 0)
      throw Error(ErrorCode::SceneNotVisible,
                  "frame " + std::to_string(frame_idx) + " sees no scene segment");

    sequence.ground_truth.push_back({synth.frame.timestamp, camera_in_world[frame_idx]});
    sequence.frames.push_back(std::move(synth));
  }
  return sequence;
}

}  // namespace edgevo
