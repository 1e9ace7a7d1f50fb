#pragma once

#include <vector>

#include "edgevo/camera.hpp"
#include "edgevo/dataset.hpp"
#include "edgevo/distance_transform.hpp"
#include "edgevo/edge_map.hpp"

namespace edgevo {

struct PyramidLevel {
  int level = 0;
  ImageF intensity;
  ImageF depth;
  CameraIntrinsics intrinsics;
  EdgeMap edges;
  DistanceField dist;
};

/// Downsampling rules: intensity 2x2 mean, depth mean of valid (nonzero)
/// children, edge mask OR-pooling. Dimensions shrink by ceil(dim/2).
ImageF downsample_intensity(const ImageF& src, ExecMode mode = ExecMode::Parallel);
ImageF downsample_depth(const ImageF& src, ExecMode mode = ExecMode::Parallel);
ImageU8 downsample_mask(const ImageU8& src, ExecMode mode = ExecMode::Parallel);

/// Coarse-to-fine pyramid: level 0 is the input frame; each level halves the
/// previous one and recomputes the distance transform from its pooled mask.
/// Throws Error{TooManyLevels} if any level would fall below 32x32 pixels,
/// and propagates NoEdgePixels for an empty level-0 mask.
std::vector<PyramidLevel> build_pyramid(const Frame& frame, const EdgeMap& edges,
                                        const CameraIntrinsics& intrinsics, int levels,
                                        ExecMode mode = ExecMode::Parallel);

}  // namespace edgevo
