#include "edgevo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "edgevo/errors.hpp"

namespace edgevo {

std::vector<TimedPath> read_index_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::DatasetError, "cannot open index file " + path);
  std::vector<TimedPath> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    TimedPath entry;
    if (!(ss >> entry.timestamp >> entry.path))
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": expected 'timestamp filename'");
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::vector<std::pair<TimedPath, TimedPath>> associate_frames(const std::vector<TimedPath>& rgb,
                                                              const std::vector<TimedPath>& depth,
                                                              double max_dt) {
  if (rgb.empty() || depth.empty())
    throw Error(ErrorCode::EmptyInput, "association needs both streams non-empty");
  if (!(max_dt > 0)) throw Error(ErrorCode::ConfigError, "max_dt must be positive");

  struct Candidate {
    double dt;
    int i, j;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < static_cast<int>(rgb.size()); ++i) {
    const double t = rgb[i].timestamp;
    auto lo = std::lower_bound(depth.begin(), depth.end(), t - max_dt,
                               [](const TimedPath& e, double v) { return e.timestamp < v; });
    for (auto it = lo; it != depth.end() && it->timestamp <= t + max_dt; ++it)
      candidates.push_back({std::abs(it->timestamp - t), i,
                            static_cast<int>(std::distance(depth.begin(), it))});
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.dt != b.dt) return a.dt < b.dt;
    if (rgb[a.i].timestamp != rgb[b.i].timestamp)
      return rgb[a.i].timestamp < rgb[b.i].timestamp;
    return depth[a.j].timestamp < depth[b.j].timestamp;
  });

  std::vector<char> rgb_used(rgb.size(), 0), depth_used(depth.size(), 0);
  std::vector<std::pair<TimedPath, TimedPath>> pairs;
  for (const Candidate& c : candidates) {
    if (rgb_used[c.i] || depth_used[c.j]) continue;
    rgb_used[c.i] = depth_used[c.j] = 1;
    pairs.emplace_back(rgb[c.i], depth[c.j]);
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const auto& a, const auto& b) { return a.first.timestamp < b.first.timestamp; });
  return pairs;
}

Frame load_frame(const std::string& rgb_path, const std::string& depth_path,
                 const CameraIntrinsics& intrinsics) {
  const cv::Mat rgb = cv::imread(rgb_path, cv::IMREAD_UNCHANGED);
  if (rgb.empty()) throw Error(ErrorCode::DecodeError, "cannot decode " + rgb_path);
  const cv::Mat depth = cv::imread(depth_path, cv::IMREAD_UNCHANGED);
  if (depth.empty()) throw Error(ErrorCode::DecodeError, "cannot decode " + depth_path);

  if (rgb.cols != intrinsics.width || rgb.rows != intrinsics.height ||
      depth.cols != intrinsics.width || depth.rows != intrinsics.height)
    throw Error(ErrorCode::DimensionMismatch,
                "image dimensions do not match intrinsics for " + rgb_path);
  if (depth.type() != CV_16UC1)
    throw Error(ErrorCode::DecodeError, "expected 16-bit single-channel depth: " + depth_path);

  Frame frame;
  frame.rgb_path = rgb_path;
  frame.depth_path = depth_path;
  frame.intensity = ImageF(intrinsics.width, intrinsics.height);
  frame.depth = ImageF(intrinsics.width, intrinsics.height);

  if (rgb.type() == CV_8UC3) {
    for (int y = 0; y < rgb.rows; ++y) {
      const cv::Vec3b* row = rgb.ptr<cv::Vec3b>(y);  // BGR
      float* dst = frame.intensity.row(y);
      for (int x = 0; x < rgb.cols; ++x)
        dst[x] = static_cast<float>(
            (0.299 * row[x][2] + 0.587 * row[x][1] + 0.114 * row[x][0]) / 255.0);
    }
  } else if (rgb.type() == CV_8UC1) {
    for (int y = 0; y < rgb.rows; ++y) {
      const std::uint8_t* row = rgb.ptr<std::uint8_t>(y);
      float* dst = frame.intensity.row(y);
      for (int x = 0; x < rgb.cols; ++x) dst[x] = row[x] / 255.f;
    }
  } else {
    throw Error(ErrorCode::DecodeError, "unsupported rgb pixel format: " + rgb_path);
  }

  const double inv_scale = 1.0 / intrinsics.depth_scale;
  for (int y = 0; y < depth.rows; ++y) {
    const std::uint16_t* row = depth.ptr<std::uint16_t>(y);
    float* dst = frame.depth.row(y);
    for (int x = 0; x < depth.cols; ++x)
      dst[x] = row[x] == 0 ? 0.f : static_cast<float>(row[x] * inv_scale);
  }
  return frame;
}

EdgeMap load_external_edge_map(const std::string& path, int width, int height,
                               int binarize_threshold) {
  const cv::Mat img = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (img.empty()) throw Error(ErrorCode::DecodeError, "cannot decode edge map " + path);
  if (img.cols != width || img.rows != height)
    throw Error(ErrorCode::DimensionMismatch, "edge map dimensions mismatch: " + path);

  EdgeMap edges(width, height, EdgeSource::External);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < width; ++x)
      if (row[x] >= binarize_threshold) edges.set(x, y);
  }
  return edges;
}

void write_trajectory(const Trajectory& trajectory, const std::string& path) {
  for (size_t i = 0; i < trajectory.size(); ++i) {
    if (i > 0 && !(trajectory[i].timestamp > trajectory[i - 1].timestamp))
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "timestamps must be strictly increasing at entry " + std::to_string(i));
    if (!trajectory[i].pose.is_valid_rotation(1e-9))
      throw Error(ErrorCode::ConfigError, "invalid rotation at entry " + std::to_string(i));
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::DatasetError, "cannot open " + path + " for writing");
  out << "# timestamp tx ty tz qx qy qz qw\n";
  char buf[256];
  for (const TimedPose& entry : trajectory) {
    const Eigen::Quaterniond q = to_quaternion(entry.pose.R);
    const Vec3& t = entry.pose.t;
    std::snprintf(buf, sizeof(buf), "%.6f %.12f %.12f %.12f %.12f %.12f %.12f %.12f\n",
                  entry.timestamp, t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w());
    out << buf;
  }
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open trajectory " + path);
  Trajectory trajectory;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double t, tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> t >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": expected 8 fields");
    std::string rest;
    if (ss >> rest)
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": trailing fields");
    Eigen::Quaterniond q(qw, qx, qy, qz);
    if (q.norm() < 1e-6)
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": zero-norm quaternion");
    if (!trajectory.empty() && !(t > trajectory.back().timestamp))
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  path + ":" + std::to_string(line_no) + ": timestamps must increase");
    TimedPose entry;
    entry.timestamp = t;
    entry.pose.R = from_quaternion(q);
    entry.pose.t = Vec3(tx, ty, tz);
    trajectory.push_back(entry);
  }
  return trajectory;
}

ImageU8 decode_gray8(const std::string& path) {
  const cv::Mat img = cv::imread(path, cv::IMREAD_GRAYSCALE);
  if (img.empty()) throw Error(ErrorCode::DecodeError, "cannot decode " + path);
  ImageU8 out(img.cols, img.rows);
  for (int y = 0; y < img.rows; ++y) {
    const std::uint8_t* row = img.ptr<std::uint8_t>(y);
    std::copy(row, row + img.cols, out.row(y));
  }
  return out;
}

void write_gray8(const ImageU8& image, const std::string& path) {
  cv::Mat mat(image.height(), image.width(), CV_8UC1);
  for (int y = 0; y < image.height(); ++y)
    std::copy(image.row(y), image.row(y) + image.width(), mat.ptr<std::uint8_t>(y));
  if (!cv::imwrite(path, mat))
    throw Error(ErrorCode::DatasetError, "cannot write image " + path);
}

void write_gray16(const Image<std::uint16_t>& image, const std::string& path) {
  cv::Mat mat(image.height(), image.width(), CV_16UC1);
  for (int y = 0; y < image.height(); ++y)
    std::copy(image.row(y), image.row(y) + image.width(), mat.ptr<std::uint16_t>(y));
  if (!cv::imwrite(path, mat))
    throw Error(ErrorCode::DatasetError, "cannot write image " + path);
}

}  // namespace edgevo
