#pragma once

#include <string>
#include <utility>
#include <vector>

#include "edgevo/camera.hpp"
#include "edgevo/edge_map.hpp"
#include "edgevo/image.hpp"
#include "edgevo/se3.hpp"

namespace edgevo {

struct Frame {
  double timestamp = 0;
  ImageF intensity;  // grayscale in [0,1]
  ImageF depth;      // meters, 0 = invalid
  std::string rgb_path;
  std::string depth_path;
};

struct TimedPose {
  double timestamp = 0;
  Pose pose;
};

using Trajectory = std::vector<TimedPose>;

struct TimedPath {
  double timestamp = 0;
  std::string path;
};

/// One "timestamp filename" line per record; '#' comments and blanks skipped.
std::vector<TimedPath> read_index_file(const std::string& path);

/// Greedy nearest-timestamp association of two sorted streams within max_dt;
/// each entry used at most once, output sorted by the first stream's time.
/// Throws Error{EmptyInput} if either list is empty.
std::vector<std::pair<TimedPath, TimedPath>> associate_frames(const std::vector<TimedPath>& rgb,
                                                              const std::vector<TimedPath>& depth,
                                                              double max_dt);

/// Decode an RGB + 16-bit depth pair into a Frame. Intensity is
/// (0.299 R + 0.587 G + 0.114 B)/255; depth is raw/depth_scale with raw 0
/// kept as 0 (invalid). Throws DecodeError / DimensionMismatch.
Frame load_frame(const std::string& rgb_path, const std::string& depth_path,
                 const CameraIntrinsics& intrinsics);

/// External (e.g. CNN-predicted) edge map stored as an 8-bit grayscale image;
/// pixels >= binarize_threshold become edges.
EdgeMap load_external_edge_map(const std::string& path, int width, int height,
                               int binarize_threshold);

/// TUM trajectory format: "timestamp tx ty tz qx qy qz qw" per line,
/// quaternion scalar-last. read(write(T)) reproduces poses within 1e-9.
void write_trajectory(const Trajectory& trajectory, const std::string& path);
Trajectory read_trajectory(const std::string& path);

// Grayscale image io used by the CLI debug dumps and external edge ingestion.
ImageU8 decode_gray8(const std::string& path);
void write_gray8(const ImageU8& image, const std::string& path);
void write_gray16(const Image<std::uint16_t>& image, const std::string& path);

}  // namespace edgevo
