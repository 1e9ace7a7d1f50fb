#pragma once

#include <map>
#include <string>

#include "edgevo/camera.hpp"
#include "edgevo/canny.hpp"
#include "edgevo/tracker.hpp"

namespace edgevo {

/// Run configuration. Every field has a default; an empty config runs the
/// bundled synthetic demo end to end.
struct RunConfig {
  std::string dataset;                 // TUM sequence directory; empty -> synthetic demo
  std::string edge_source = "canny";   // canny | external
  double assoc_max_dt = 0.02;          // seconds
  int edge_binarize_threshold = 128;   // external edge maps, [0,255]

  CameraIntrinsics intrinsics{525.0, 525.0, 319.5, 239.5, 640, 480, 5000.0};
  CannyConfig canny;
  TrackerConfig tracker;

  std::string trajectory_path = "trajectory.txt";
  std::string diagnostics_path;  // empty -> not written

  int demo_frames = 100;
  double demo_noise = 0;  // px jitter on synthetic edges

  void validate() const;  // throws Error{ConfigError}
};

/// Flat "key = value" file, '#' comments. Unknown keys are ConfigError.
RunConfig load_run_config(const std::string& path);

/// Apply one "key=value" override (same keys as the config file).
void apply_override(RunConfig& config, const std::string& key, const std::string& value);

/// Parse helper shared by file loading and CLI overrides.
std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace edgevo
