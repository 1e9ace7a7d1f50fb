#pragma once

#include <cstdint>
#include <vector>

#include "edgevo/image.hpp"

namespace edgevo {

enum class EdgeSource { Canny, External, Augmented };

/// Binary edge mask. mask.at(x,y) != 0 means edge pixel.
struct EdgeMap {
  ImageU8 mask;
  EdgeSource source = EdgeSource::Canny;

  EdgeMap() = default;
  EdgeMap(int width, int height, EdgeSource src) : mask(width, height, 0), source(src) {}

  int width() const { return mask.width(); }
  int height() const { return mask.height(); }
  bool is_edge(int x, int y) const { return mask.at(x, y) != 0; }
  void set(int x, int y) { mask.at(x, y) = 1; }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < mask.size(); ++i) n += mask.data()[i] != 0;
    return n;
  }
};

}  // namespace edgevo
