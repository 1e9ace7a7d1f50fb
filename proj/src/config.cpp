#include "edgevo/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "edgevo/errors.hpp"

namespace edgevo {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "key '" + key + "' expects a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v))
    throw Error(ErrorCode::ConfigError, "key '" + key + "' expects an integer");
  return static_cast<int>(v);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": empty key");
    entries[key] = value;
  }
  return entries;
}

void apply_override(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "dataset") config.dataset = value;
  else if (key == "edge_source") config.edge_source = value;
  else if (key == "assoc_max_dt") config.assoc_max_dt = parse_double(key, value);
  else if (key == "edge_binarize_threshold")
    config.edge_binarize_threshold = parse_int(key, value);
  else if (key == "fx") config.intrinsics.fx = parse_double(key, value);
  else if (key == "fy") config.intrinsics.fy = parse_double(key, value);
  else if (key == "cx") config.intrinsics.cx = parse_double(key, value);
  else if (key == "cy") config.intrinsics.cy = parse_double(key, value);
  else if (key == "width") config.intrinsics.width = parse_int(key, value);
  else if (key == "height") config.intrinsics.height = parse_int(key, value);
  else if (key == "depth_scale") config.intrinsics.depth_scale = parse_double(key, value);
  else if (key == "canny_low") config.canny.low = parse_double(key, value);
  else if (key == "canny_high") config.canny.high = parse_double(key, value);
  else if (key == "canny_blur_sigma") config.canny.blur_sigma = parse_double(key, value);
  else if (key == "corner_window_size") config.tracker.corner.window_size = parse_int(key, value);
  else if (key == "corner_threshold_frac")
    config.tracker.corner.response_threshold_frac = parse_double(key, value);
  else if (key == "prune_window") config.tracker.corner.prune_window = parse_int(key, value);
  else if (key == "prune_stride") config.tracker.corner.prune_stride = parse_int(key, value);
  else if (key == "max_corners_per_window")
    config.tracker.corner.max_corners_per_window = parse_int(key, value);
  else if (key == "stamp_radius") config.tracker.corner.stamp_radius = parse_int(key, value);
  else if (key == "huber_theta")
    config.tracker.robust.huber_theta = value == "auto" ? 0.0 : parse_double(key, value);
  else if (key == "lm_lambda_init") config.tracker.robust.lambda_init = parse_double(key, value);
  else if (key == "lm_lambda_up") config.tracker.robust.lambda_up = parse_double(key, value);
  else if (key == "lm_lambda_down") config.tracker.robust.lambda_down = parse_double(key, value);
  else if (key == "lm_max_iters")
    config.tracker.robust.max_iters_per_level = parse_int(key, value);
  else if (key == "lm_step_tol") config.tracker.robust.step_tol = parse_double(key, value);
  else if (key == "lm_cost_tol") config.tracker.robust.cost_tol = parse_double(key, value);
  else if (key == "keyframe_period") config.tracker.keyframe.period = parse_int(key, value);
  else if (key == "keyframe_trans_threshold")
    config.tracker.keyframe.trans_threshold = parse_double(key, value);
  else if (key == "keyframe_rot_threshold_deg")
    config.tracker.keyframe.rot_threshold = parse_double(key, value) * M_PI / 180.0;
  else if (key == "pyramid_levels") config.tracker.pyramid_levels = parse_int(key, value);
  else if (key == "max_points_level0") config.tracker.max_points_level0 = parse_int(key, value);
  else if (key == "min_points_per_level")
    config.tracker.min_points_per_level = parse_int(key, value);
  else if (key == "trajectory_path") config.trajectory_path = value;
  else if (key == "diagnostics_path") config.diagnostics_path = value;
  else if (key == "demo_frames") config.demo_frames = parse_int(key, value);
  else if (key == "demo_noise") config.demo_noise = parse_double(key, value);
  else
    throw Error(ErrorCode::ConfigError, "unknown config key '" + key + "'");
}

void RunConfig::validate() const {
  intrinsics.validate();
  tracker.corner.validate();
  tracker.robust.validate();
  tracker.keyframe.validate();
  if (edge_source != "canny" && edge_source != "external")
    throw Error(ErrorCode::ConfigError, "edge_source must be 'canny' or 'external'");
  if (!(assoc_max_dt > 0)) throw Error(ErrorCode::ConfigError, "assoc_max_dt must be positive");
  if (edge_binarize_threshold < 0 || edge_binarize_threshold > 255)
    throw Error(ErrorCode::ConfigError, "edge_binarize_threshold must be in [0,255]");
  if (!(canny.low >= 0) || !(canny.low < canny.high))
    throw Error(ErrorCode::ConfigError, "canny thresholds require 0 <= low < high");
  if (!(canny.blur_sigma >= 0))
    throw Error(ErrorCode::ConfigError, "canny_blur_sigma must be >= 0");
  if (tracker.pyramid_levels < 1)
    throw Error(ErrorCode::ConfigError, "pyramid_levels must be >= 1");
  if (tracker.max_points_level0 < tracker.min_points_per_level)
    throw Error(ErrorCode::ConfigError, "max_points_level0 below min_points_per_level");
  if (demo_frames < 1) throw Error(ErrorCode::ConfigError, "demo_frames must be >= 1");
  if (trajectory_path.empty())
    throw Error(ErrorCode::ConfigError, "trajectory_path must not be empty");
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();

  RunConfig config;
  for (const auto& [key, value] : parse_key_values(buffer.str()))
    apply_override(config, key, value);
  config.validate();
  return config;
}

}  // namespace edgevo
