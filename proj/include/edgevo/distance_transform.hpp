#pragma once

#include <optional>

#include "edgevo/edge_map.hpp"
#include "edgevo/image.hpp"
#include "edgevo/parallel.hpp"

namespace edgevo {

/// Exact Euclidean distance to the nearest edge pixel, plus the
/// central-difference gradient of that distance (one-sided at borders).
struct DistanceField {
  ImageF dist;
  ImageF grad_x;
  ImageF grad_y;

  int width() const { return dist.width(); }
  int height() const { return dist.height(); }

  struct Sample {
    double dist;
    double grad_x;
    double grad_y;
  };

  /// Bilinear interpolation of dist and grad at subpixel (u,v).
  /// Empty when (u,v) is outside [0,width-1] x [0,height-1].
  std::optional<Sample> sample_bilinear(double u, double v) const;
};

/// Exact Euclidean distance transform (two-pass separable lower-envelope
/// algorithm). Throws Error{NoEdgePixels} on an empty mask.
DistanceField distance_transform(const EdgeMap& edges, ExecMode mode = ExecMode::Parallel);

/// Gradient of an arbitrary scalar grid by central differences (one-sided at
/// borders). Used by distance_transform; exposed for synthetic test fields.
void grid_gradient(const ImageF& values, ImageF& grad_x, ImageF& grad_y,
                   ExecMode mode = ExecMode::Parallel);

}  // namespace edgevo
