#include "edgevo/pyramid.hpp"

#include <algorithm>

#include "edgevo/errors.hpp"

namespace edgevo {

namespace {
constexpr int kMinLevelDim = 32;

template <typename T, typename Pool>
Image<T> downsample_2x2(const Image<T>& src, ExecMode mode, Pool&& pool) {
  const int out_w = (src.width() + 1) / 2;
  const int out_h = (src.height() + 1) / 2;
  Image<T> out(out_w, out_h);
  parallel_for(out_h, mode, [&](int y) {
    for (int x = 0; x < out_w; ++x) {
      const int x0 = 2 * x;
      const int y0 = 2 * y;
      const int x1 = std::min(x0 + 1, src.width() - 1);
      const int y1 = std::min(y0 + 1, src.height() - 1);
      out.at(x, y) = pool(src.at(x0, y0), src.at(x1, y0), src.at(x0, y1), src.at(x1, y1));
    }
  });
  return out;
}
}  // namespace

ImageF downsample_intensity(const ImageF& src, ExecMode mode) {
  return downsample_2x2(src, mode, [](float a, float b, float c, float d) {
    return 0.25f * (a + b + c + d);
  });
}

ImageF downsample_depth(const ImageF& src, ExecMode mode) {
  // Mean of the valid (nonzero) children; 0 when none are valid.
  return downsample_2x2(src, mode, [](float a, float b, float c, float d) {
    float sum = 0;
    int n = 0;
    for (float v : {a, b, c, d}) {
      if (v > 0) {
        sum += v;
        ++n;
      }
    }
    return n > 0 ? sum / n : 0.f;
  });
}

ImageU8 downsample_mask(const ImageU8& src, ExecMode mode) {
  return downsample_2x2(src, mode, [](std::uint8_t a, std::uint8_t b, std::uint8_t c,
                                      std::uint8_t d) -> std::uint8_t {
    return (a | b | c | d) ? 1 : 0;
  });
}

std::vector<PyramidLevel> build_pyramid(const Frame& frame, const EdgeMap& edges,
                                        const CameraIntrinsics& intrinsics, int levels,
                                        ExecMode mode) {
  if (levels < 1) throw Error(ErrorCode::ConfigError, "pyramid needs at least one level");
  {
    int w = intrinsics.width;
    int h = intrinsics.height;
    for (int l = 1; l < levels; ++l) {
      w = (w + 1) / 2;
      h = (h + 1) / 2;
      if (w < kMinLevelDim || h < kMinLevelDim)
        throw Error(ErrorCode::TooManyLevels, "pyramid level below 32x32");
    }
  }
  if (!frame.intensity.same_size(frame.depth) || frame.intensity.width() != intrinsics.width ||
      frame.intensity.height() != intrinsics.height || edges.width() != intrinsics.width ||
      edges.height() != intrinsics.height)
    throw Error(ErrorCode::DimensionMismatch, "frame/edge/intrinsics dimensions disagree");

  std::vector<PyramidLevel> pyramid;
  pyramid.reserve(levels);
  for (int l = 0; l < levels; ++l) {
    PyramidLevel level;
    level.level = l;
    if (l == 0) {
      level.intensity = frame.intensity;
      level.depth = frame.depth;
      level.intrinsics = intrinsics;
      level.edges = edges;
    } else {
      const PyramidLevel& prev = pyramid.back();
      level.intensity = downsample_intensity(prev.intensity, mode);
      level.depth = downsample_depth(prev.depth, mode);
      level.intrinsics = prev.intrinsics.halved();
      level.edges.mask = downsample_mask(prev.edges.mask, mode);
      level.edges.source = edges.source;
    }
    level.dist = distance_transform(level.edges, mode);
    pyramid.push_back(std::move(level));
  }
  return pyramid;
}

}  // namespace edgevo
