#pragma once

#include <vector>

#include "edgevo/edge_map.hpp"
#include "edgevo/image.hpp"
#include "edgevo/parallel.hpp"

namespace edgevo {

struct CornerConfig {
  int window_size = 5;              // structure tensor window, odd
  double response_threshold_frac = 0.01;  // of the max response
  int prune_window = 20;
  int prune_stride = 20;
  int max_corners_per_window = 5;
  int stamp_radius = 3;

  void validate() const;
};

struct Corner {
  int x = 0;
  int y = 0;
  double response = 0;
};

using CornerSet = std::vector<Corner>;

/// Gaussian window weights for the structure tensor, normalized to sum 1.
std::vector<double> gaussian_window_weights(int window_size);

/// Min-eigenvalue response of the windowed structure tensor
/// M = sum w(dx,dy) [Ix^2 IxIy; IxIy Iy^2], with Ix/Iy central differences.
/// Pixels whose window leaves the image get response 0.
/// Throws Error{ImageTooSmall} if the image is smaller than the window.
ImageD structure_tensor_response(const ImageF& intensity, int window_size,
                                 ExecMode mode = ExecMode::Parallel);

/// Corners: response > frac * max(response) and 3x3 local maximum
/// (ties broken toward the smaller row-major index). Row-major output order.
CornerSet select_corners(const ImageD& response, double threshold_frac);

/// Sliding-window density pruning: boxes of prune_window px stepped by
/// prune_stride, left-to-right then top-to-bottom; a box holding more than
/// max_per_window live corners keeps only its top max_per_window by response
/// (ties toward the smaller row-major coordinate). Removals persist.
CornerSet prune_density(const CornerSet& corners, int prune_window, int prune_stride,
                        int max_per_window, int width, int height);

/// Union of the input mask with a midpoint circle of stamp_radius around each
/// corner (center pixel included, clipped to bounds). Source becomes Augmented.
EdgeMap augment_edge_map(const EdgeMap& edges, const CornerSet& corners, int stamp_radius);

/// Integer midpoint-circle offsets for the given radius (8-way symmetric).
std::vector<std::pair<int, int>> midpoint_circle_offsets(int radius);

struct CornerOptimization {
  CornerSet corners;  // pruned survivors
  EdgeMap augmented;
};

/// Full corner-optimization pass over an edge image: Shi-Tomasi response on
/// the binary mask treated as intensity, threshold + NMS selection, density
/// pruning, and circle stamping.
CornerOptimization corner_optimize(const EdgeMap& edges, const CornerConfig& config,
                                   ExecMode mode = ExecMode::Parallel);

}  // namespace edgevo
