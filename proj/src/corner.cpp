#include "edgevo/corner.hpp"

#include <algorithm>
#include <cmath>

#include "edgevo/errors.hpp"

namespace edgevo {

void CornerConfig::validate() const {
  if (window_size < 3 || window_size % 2 == 0)
    throw Error(ErrorCode::ConfigError, "corner window_size must be odd and >= 3");
  if (!(response_threshold_frac > 0) || !(response_threshold_frac <= 1))
    throw Error(ErrorCode::ConfigError, "response_threshold_frac must be in (0,1]");
  if (prune_window < 1 || prune_stride < 1 || max_corners_per_window < 1 || stamp_radius < 1)
    throw Error(ErrorCode::ConfigError, "corner pruning/stamp parameters must be >= 1");
}

std::vector<double> gaussian_window_weights(int window_size) {
  const int half = (window_size - 1) / 2;
  const double sigma = std::max(0.5, 0.5 * half);
  std::vector<double> weights(window_size);
  double sum = 0;
  for (int i = -half; i <= half; ++i) {
    weights[i + half] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += weights[i + half];
  }
  for (auto& w : weights) w /= sum;
  return weights;
}

ImageD structure_tensor_response(const ImageF& intensity, int window_size, ExecMode mode) {
  const int width = intensity.width();
  const int height = intensity.height();
  if (width < window_size || height < window_size)
    throw Error(ErrorCode::ImageTooSmall, "image smaller than the structure-tensor window");

  const int half = (window_size - 1) / 2;
  const std::vector<double> w = gaussian_window_weights(window_size);

  ImageD ixx(width, height, 0.0), ixy(width, height, 0.0), iyy(width, height, 0.0);
  parallel_for(height, mode, [&](int y) {
    if (y == 0 || y == height - 1) return;
    for (int x = 1; x < width - 1; ++x) {
      const double ix = 0.5 * (static_cast<double>(intensity.at(x + 1, y)) - intensity.at(x - 1, y));
      const double iy = 0.5 * (static_cast<double>(intensity.at(x, y + 1)) - intensity.at(x, y - 1));
      ixx.at(x, y) = ix * ix;
      ixy.at(x, y) = ix * iy;
      iyy.at(x, y) = iy * iy;
    }
  });

  // Separable Gaussian window: horizontal then vertical weighted sums.
  ImageD hxx(width, height, 0.0), hxy(width, height, 0.0), hyy(width, height, 0.0);
  parallel_for(height, mode, [&](int y) {
    for (int x = half; x < width - half; ++x) {
      double sxx = 0, sxy = 0, syy = 0;
      for (int i = -half; i <= half; ++i) {
        const double wi = w[i + half];
        sxx += wi * ixx.at(x + i, y);
        sxy += wi * ixy.at(x + i, y);
        syy += wi * iyy.at(x + i, y);
      }
      hxx.at(x, y) = sxx;
      hxy.at(x, y) = sxy;
      hyy.at(x, y) = syy;
    }
  });

  ImageD response(width, height, 0.0);
  // Valid band: the window plus the 1-px gradient margin must fit.
  const int margin = half + 1;
  parallel_for(height, mode, [&](int y) {
    if (y < margin || y >= height - margin) return;
    for (int x = margin; x < width - margin; ++x) {
      double sxx = 0, sxy = 0, syy = 0;
      for (int i = -half; i <= half; ++i) {
        const double wi = w[i + half];
        sxx += wi * hxx.at(x, y + i);
        sxy += wi * hxy.at(x, y + i);
        syy += wi * hyy.at(x, y + i);
      }
      // min eigenvalue of [sxx sxy; sxy syy]
      const double mean = 0.5 * (sxx + syy);
      const double diff = 0.5 * (sxx - syy);
      const double lambda_min = mean - std::sqrt(diff * diff + sxy * sxy);
      response.at(x, y) = std::max(0.0, lambda_min);
    }
  });
  return response;
}

CornerSet select_corners(const ImageD& response, double threshold_frac) {
  const int width = response.width();
  const int height = response.height();
  double max_response = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) max_response = std::max(max_response, response.at(x, y));

  CornerSet corners;
  if (max_response <= 0) return corners;
  const double threshold = threshold_frac * max_response;

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double r = response.at(x, y);
      if (!(r > threshold)) continue;
      // 3x3 local maximum; ties go to the smaller row-major index
      bool keep = true;
      const long index = static_cast<long>(y) * width + x;
      for (int dy = -1; dy <= 1 && keep; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx;
          const int ny = y + dy;
          if (!response.in_bounds(nx, ny)) continue;
          const double rn = response.at(nx, ny);
          const long nindex = static_cast<long>(ny) * width + nx;
          if (rn > r || (rn == r && nindex < index)) {
            keep = false;
            break;
          }
        }
      }
      if (keep) corners.push_back({x, y, r});
    }
  }
  return corners;
}

namespace {

bool retention_order(const Corner& a, const Corner& b, int width) {
  if (a.response != b.response) return a.response > b.response;
  return static_cast<long>(a.y) * width + a.x < static_cast<long>(b.y) * width + b.x;
}

}  // namespace

CornerSet prune_density(const CornerSet& corners, int prune_window, int prune_stride,
                        int max_per_window, int width, int height) {
  // Indices sorted by row-major coordinate; y-subranges found by binary search.
  std::vector<int> order(corners.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (corners[a].y != corners[b].y) return corners[a].y < corners[b].y;
    return corners[a].x < corners[b].x;
  });

  std::vector<char> alive(corners.size(), 1);
  std::vector<int> box_members;
  for (int y0 = 0; y0 < height; y0 += prune_stride) {
    const auto lo = std::lower_bound(order.begin(), order.end(), y0,
                                     [&](int idx, int value) { return corners[idx].y < value; });
    const auto hi = std::lower_bound(order.begin(), order.end(), y0 + prune_window,
                                     [&](int idx, int value) { return corners[idx].y < value; });
    if (lo == hi) continue;
    for (int x0 = 0; x0 < width; x0 += prune_stride) {
      box_members.clear();
      for (auto it = lo; it != hi; ++it) {
        const Corner& c = corners[*it];
        if (alive[*it] && c.x >= x0 && c.x < x0 + prune_window) box_members.push_back(*it);
      }
      if (static_cast<int>(box_members.size()) <= max_per_window) continue;
      std::nth_element(box_members.begin(), box_members.begin() + max_per_window,
                       box_members.end(),
                       [&](int a, int b) { return retention_order(corners[a], corners[b], width); });
      for (size_t i = max_per_window; i < box_members.size(); ++i) alive[box_members[i]] = 0;
    }
  }

  CornerSet survivors;
  for (size_t i = 0; i < corners.size(); ++i)
    if (alive[i]) survivors.push_back(corners[i]);
  return survivors;
}

std::vector<std::pair<int, int>> midpoint_circle_offsets(int radius) {
  std::vector<std::pair<int, int>> points;
  if (radius <= 0) return points;
  int x = radius;
  int y = 0;
  int err = 1 - radius;
  while (x >= y) {
    points.emplace_back(x, y);
    points.emplace_back(y, x);
    points.emplace_back(-x, y);
    points.emplace_back(-y, x);
    points.emplace_back(x, -y);
    points.emplace_back(y, -x);
    points.emplace_back(-x, -y);
    points.emplace_back(-y, -x);
    ++y;
    if (err < 0) {
      err += 2 * y + 1;
    } else {
      --x;
      err += 2 * (y - x) + 1;
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

CornerOptimization corner_optimize(const EdgeMap& edges, const CornerConfig& config,
                                   ExecMode mode) {
  config.validate();
  ImageF as_intensity(edges.width(), edges.height());
  parallel_for(edges.height(), mode, [&](int y) {
    const std::uint8_t* src = edges.mask.row(y);
    float* dst = as_intensity.row(y);
    for (int x = 0; x < edges.width(); ++x) dst[x] = src[x] ? 1.f : 0.f;
  });

  const ImageD response = structure_tensor_response(as_intensity, config.window_size, mode);
  CornerSet corners = select_corners(response, config.response_threshold_frac);
  corners = prune_density(corners, config.prune_window, config.prune_stride,
                          config.max_corners_per_window, edges.width(), edges.height());
  CornerOptimization result;
  result.augmented = augment_edge_map(edges, corners, config.stamp_radius);
  result.corners = std::move(corners);
  return result;
}

EdgeMap augment_edge_map(const EdgeMap& edges, const CornerSet& corners, int stamp_radius) {
  EdgeMap out = edges;
  out.source = EdgeSource::Augmented;
  const auto circle = midpoint_circle_offsets(stamp_radius);
  for (const Corner& c : corners) {
    if (out.mask.in_bounds(c.x, c.y)) out.set(c.x, c.y);
    for (const auto& [dx, dy] : circle) {
      const int x = c.x + dx;
      const int y = c.y + dy;
      if (out.mask.in_bounds(x, y)) out.set(x, y);
    }
  }
  return out;
}

}  // namespace edgevo
