#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "edgevo/camera.hpp"
#include "edgevo/dataset.hpp"
#include "edgevo/edge_map.hpp"

namespace edgevo {

/// Wireframe scene: 3D line segments in world coordinates.
struct WireScene {
  std::vector<std::pair<Vec3, Vec3>> segments;
};

/// Cube wireframe (12 edges) plus face diagonals on the front face, centered
/// at `center`, axis aligned.
WireScene make_cube_scene(double edge_length, const Vec3& center, bool face_diagonals = true);

/// Horizontal rungs between two x bounds, spaced `spacing` apart in y.
/// Periodic structure for convergence-basin experiments.
void add_ladder(WireScene& scene, double x0, double x1, double y0, int rungs, double spacing,
                double z);

struct SyntheticOptions {
  double edge_jitter_sigma = 0;   // Gaussian pixel jitter on rasterized edges
  int surface_patch_radius = 2;   // half-width of the depth band around segments
  double fps = 30.0;
  std::uint64_t seed = 1234;
};

struct SyntheticFrame {
  Frame frame;
  EdgeMap edges;  // exact rasterized edge mask (pre-jitter geometry, post-jitter pixels)
};

struct SyntheticSequence {
  std::vector<SyntheticFrame> frames;
  Trajectory ground_truth;  // camera-to-world poses
};

/// Render binary edge images of the wireframe along a camera path, with
/// z-buffered depth on the segments (exact ray depths at edge pixels) and a
/// surrounding surface band. Intensity is white background with dark edges.
/// Throws Error{SceneNotVisible} if a frame sees no segment.
SyntheticSequence generate_synthetic_sequence(const WireScene& scene,
                                              const std::vector<Pose>& camera_in_world,
                                              const CameraIntrinsics& intrinsics,
                                              const SyntheticOptions& options = {});

/// Smooth wobble path starting at identity: per-frame translation step of
/// exactly trans_step meters and rotation step of rot_step radians, direction
/// varying slowly so the scene stays in view.
std::vector<Pose> make_wobble_path(int n_frames, double trans_step, double rot_step);

}  // namespace edgevo
