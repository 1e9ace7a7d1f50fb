#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace edgevo {

/// Dense row-major raster. (0,0) is the top-left pixel, x grows right, y grows down.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  size_t size() const { return data_.size(); }

  T& at(int x, int y) {
    assert(in_bounds(x, y));
    return data_[static_cast<size_t>(y) * width_ + x];
  }
  const T& at(int x, int y) const {
    assert(in_bounds(x, y));
    return data_[static_cast<size_t>(y) * width_ + x];
  }

  T* row(int y) { return data_.data() + static_cast<size_t>(y) * width_; }
  const T* row(int y) const { return data_.data() + static_cast<size_t>(y) * width_; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width_ && y >= 0 && y < height_; }

  bool same_size(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  void fill(T value) { data_.assign(data_.size(), value); }

  bool operator==(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ && data_ == other.data_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ImageF = Image<float>;
using ImageD = Image<double>;
using ImageU8 = Image<std::uint8_t>;

}  // namespace edgevo
