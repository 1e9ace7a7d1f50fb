#pragma once

#include "edgevo/edge_map.hpp"
#include "edgevo/image.hpp"
#include "edgevo/parallel.hpp"

namespace edgevo {

struct CannyConfig {
  double low = 50.0;    // hysteresis thresholds on the [0,255] gradient scale
  double high = 150.0;
  double blur_sigma = 1.0;
};

/// Classic Canny on an intensity image in [0,1]: Gaussian blur, Sobel,
/// non-maximum suppression, double-threshold hysteresis. Thresholds apply to
/// the L2 gradient magnitude of the image rescaled to [0,255].
/// Throws Error{BadThresholds} if low >= high.
EdgeMap detect_edges_canny(const ImageF& intensity, const CannyConfig& config,
                           ExecMode mode = ExecMode::Parallel);

/// Separable Gaussian blur with replicate borders; sigma <= 0 is a copy.
ImageF gaussian_blur(const ImageF& image, double sigma, ExecMode mode = ExecMode::Parallel);

}  // namespace edgevo
