#include "edgevo/canny.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "edgevo/errors.hpp"

namespace edgevo {

ImageF gaussian_blur(const ImageF& image, double sigma, ExecMode mode) {
  if (sigma <= 0) return image;

  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kernel[i + radius] = static_cast<float>(w);
    sum += w;
  }
  for (auto& w : kernel) w = static_cast<float>(w / sum);

  const int width = image.width();
  const int height = image.height();
  const auto clamp_x = [&](int x) { return std::clamp(x, 0, width - 1); };
  const auto clamp_y = [&](int y) { return std::clamp(y, 0, height - 1); };

  ImageF horizontal(width, height);
  parallel_for(height, mode, [&](int y) {
    const float* src = image.row(y);
    float* dst = horizontal.row(y);
    for (int x = 0; x < width; ++x) {
      float acc = 0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * src[clamp_x(x + i)];
      dst[x] = acc;
    }
  });

  ImageF result(width, height);
  parallel_for(height, mode, [&](int y) {
    float* dst = result.row(y);
    for (int x = 0; x < width; ++x) {
      float acc = 0;
      for (int i = -radius; i <= radius; ++i)
        acc += kernel[i + radius] * horizontal.at(x, clamp_y(y + i));
      dst[x] = acc;
    }
  });
  return result;
}

namespace {

struct Gradients {
  ImageF magnitude;
  ImageF gx;
  ImageF gy;
};

Gradients sobel(const ImageF& image, ExecMode mode) {
  const int width = image.width();
  const int height = image.height();
  Gradients g{ImageF(width, height, 0.f), ImageF(width, height, 0.f), ImageF(width, height, 0.f)};

  parallel_for(height, mode, [&](int y) {
    if (y == 0 || y == height - 1) return;
    const float* above = image.row(y - 1);
    const float* here = image.row(y);
    const float* below = image.row(y + 1);
    for (int x = 1; x < width - 1; ++x) {
      const float gx = (above[x + 1] + 2.f * here[x + 1] + below[x + 1]) -
                       (above[x - 1] + 2.f * here[x - 1] + below[x - 1]);
      const float gy = (below[x - 1] + 2.f * below[x] + below[x + 1]) -
                       (above[x - 1] + 2.f * above[x] + above[x + 1]);
      g.gx.at(x, y) = gx;
      g.gy.at(x, y) = gy;
      g.magnitude.at(x, y) = std::sqrt(gx * gx + gy * gy);
    }
  });
  return g;
}

/// Thin to local maxima along the quantized gradient direction. Ties break
/// toward the smaller row-major index so step edges stay one pixel wide.
ImageU8 non_maximum_suppression(const Gradients& g, ExecMode mode) {
  const int width = g.magnitude.width();
  const int height = g.magnitude.height();
  ImageU8 keep(width, height, 0);

  parallel_for(height, mode, [&](int y) {
    if (y == 0 || y == height - 1) return;
    for (int x = 1; x < width - 1; ++x) {
      const float mag = g.magnitude.at(x, y);
      if (mag <= 0) continue;
      const double angle = std::atan2(g.gy.at(x, y), g.gx.at(x, y));
      // fold into [0, pi) and quantize to 4 sectors
      double deg = angle * 180.0 / M_PI;
      if (deg < 0) deg += 180.0;
      float first, second;  // neighbors in row-major order
      if (deg < 22.5 || deg >= 157.5) {
        first = g.magnitude.at(x - 1, y);
        second = g.magnitude.at(x + 1, y);
      } else if (deg < 67.5) {
        first = g.magnitude.at(x - 1, y - 1);
        second = g.magnitude.at(x + 1, y + 1);
      } else if (deg < 112.5) {
        first = g.magnitude.at(x, y - 1);
        second = g.magnitude.at(x, y + 1);
      } else {
        first = g.magnitude.at(x + 1, y - 1);
        second = g.magnitude.at(x - 1, y + 1);
      }
      if (mag > first && mag >= second) keep.at(x, y) = 1;
    }
  });
  return keep;
}

}  // namespace

EdgeMap detect_edges_canny(const ImageF& intensity, const CannyConfig& config, ExecMode mode) {
  if (!(config.low >= 0) || !(config.low < config.high))
    throw Error(ErrorCode::BadThresholds, "require 0 <= low < high");

  const int width = intensity.width();
  const int height = intensity.height();

  ImageF scaled(width, height);
  parallel_for(height, mode, [&](int y) {
    const float* src = intensity.row(y);
    float* dst = scaled.row(y);
    for (int x = 0; x < width; ++x) dst[x] = src[x] * 255.f;
  });

  const ImageF blurred = gaussian_blur(scaled, config.blur_sigma, mode);
  const Gradients g = sobel(blurred, mode);
  const ImageU8 maxima = non_maximum_suppression(g, mode);

  // 0 = out, 1 = weak candidate, 2 = strong seed
  ImageU8 state(width, height, 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!maxima.at(x, y)) continue;
      const float mag = g.magnitude.at(x, y);
      if (mag >= config.high) {
        state.at(x, y) = 2;
        stack.emplace_back(x, y);
      } else if (mag >= config.low) {
        state.at(x, y) = 1;
      }
    }
  }

  EdgeMap edges(width, height, EdgeSource::Canny);
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    edges.set(x, y);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (!edges.mask.in_bounds(nx, ny)) continue;
        if (state.at(nx, ny) == 1) {
          state.at(nx, ny) = 2;
          stack.emplace_back(nx, ny);
        }
      }
    }
  }
  return edges;
}

}  // namespace edgevo
