#include "edgevo/distance_transform.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "edgevo/errors.hpp"

namespace edgevo {

namespace {

// Larger than any attainable squared distance, small enough that
// value + dim^2 stays well inside int range.
constexpr int kFarAway = std::numeric_limits<int>::max() / 4;

/// 1D lower envelope of parabolas rooted at (i, f[i]) (squared distances),
/// evaluated on the integer grid. Exact for integer f.
void squared_distance_1d(const int* f, int n, int* out, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; ++q) {
    double s = (static_cast<double>(f[q]) + static_cast<double>(q) * q -
                (static_cast<double>(f[v[k]]) + static_cast<double>(v[k]) * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = (static_cast<double>(f[q]) + static_cast<double>(q) * q -
           (static_cast<double>(f[v[k]]) + static_cast<double>(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const int dq = q - v[k];
    out[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

DistanceField distance_transform(const EdgeMap& edges, ExecMode mode) {
  const int width = edges.width();
  const int height = edges.height();
  if (edges.edge_count() == 0)
    throw Error(ErrorCode::NoEdgePixels, "distance transform needs at least one edge pixel");

  // Pass 1: per column, squared distance to the nearest edge row.
  std::vector<int> column_sq(static_cast<size_t>(width) * height);
  parallel_for(width, mode, [&](int x) {
    int last_edge = -1;
    for (int y = 0; y < height; ++y) {
      if (edges.is_edge(x, y)) last_edge = y;
      column_sq[static_cast<size_t>(y) * width + x] =
          last_edge < 0 ? kFarAway : (y - last_edge) * (y - last_edge);
    }
    last_edge = -1;
    for (int y = height - 1; y >= 0; --y) {
      if (edges.is_edge(x, y)) last_edge = y;
      if (last_edge >= 0) {
        const int d = (last_edge - y) * (last_edge - y);
        int& cell = column_sq[static_cast<size_t>(y) * width + x];
        if (d < cell) cell = d;
      }
    }
  });

  // Pass 2: per row, lower envelope over columns.
  DistanceField field;
  field.dist = ImageF(width, height);
  std::vector<int> row_out(static_cast<size_t>(width) * height);
  {
    std::vector<int> v_all;
    std::vector<double> z_all;
    const int rows = height;
    v_all.resize(static_cast<size_t>(rows) * width);
    z_all.resize(static_cast<size_t>(rows) * (width + 1));
    parallel_for(rows, mode, [&](int y) {
      squared_distance_1d(&column_sq[static_cast<size_t>(y) * width], width,
                          &row_out[static_cast<size_t>(y) * width],
                          &v_all[static_cast<size_t>(y) * width],
                          &z_all[static_cast<size_t>(y) * (width + 1)]);
      float* dist_row = field.dist.row(y);
      for (int x = 0; x < width; ++x)
        dist_row[x] = static_cast<float>(
            std::sqrt(static_cast<double>(row_out[static_cast<size_t>(y) * width + x])));
    });
  }

  grid_gradient(field.dist, field.grad_x, field.grad_y, mode);
  return field;
}

void grid_gradient(const ImageF& values, ImageF& grad_x, ImageF& grad_y, ExecMode mode) {
  const int width = values.width();
  const int height = values.height();
  grad_x = ImageF(width, height, 0.f);
  grad_y = ImageF(width, height, 0.f);

  parallel_for(height, mode, [&](int y) {
    const float* row = values.row(y);
    float* gx = grad_x.row(y);
    float* gy = grad_y.row(y);
    for (int x = 0; x < width; ++x) {
      if (width > 1) {
        if (x == 0)
          gx[x] = row[1] - row[0];
        else if (x == width - 1)
          gx[x] = row[x] - row[x - 1];
        else
          gx[x] = 0.5f * (row[x + 1] - row[x - 1]);
      }
      if (height > 1) {
        if (y == 0)
          gy[x] = values.at(x, 1) - values.at(x, 0);
        else if (y == height - 1)
          gy[x] = values.at(x, y) - values.at(x, y - 1);
        else
          gy[x] = 0.5f * (values.at(x, y + 1) - values.at(x, y - 1));
      }
    }
  });
}

std::optional<DistanceField::Sample> DistanceField::sample_bilinear(double u, double v) const {
  const int w = width();
  const int h = height();
  if (!(u >= 0.0) || !(v >= 0.0) || !(u <= w - 1.0) || !(v <= h - 1.0)) return std::nullopt;

  int x0 = static_cast<int>(std::floor(u));
  int y0 = static_cast<int>(std::floor(v));
  double fx = u - x0;
  double fy = v - y0;
  if (x0 >= w - 1) {
    x0 = std::max(0, w - 2);
    fx = w > 1 ? 1.0 : 0.0;
  }
  if (y0 >= h - 1) {
    y0 = std::max(0, h - 2);
    fy = h > 1 ? 1.0 : 0.0;
  }
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);

  const double w00 = (1.0 - fx) * (1.0 - fy);
  const double w10 = fx * (1.0 - fy);
  const double w01 = (1.0 - fx) * fy;
  const double w11 = fx * fy;

  const auto lerp = [&](const ImageF& img) {
    return w00 * img.at(x0, y0) + w10 * img.at(x1, y0) + w01 * img.at(x0, y1) +
           w11 * img.at(x1, y1);
  };
  return Sample{lerp(dist), lerp(grad_x), lerp(grad_y)};
}

}  // namespace edgevo
