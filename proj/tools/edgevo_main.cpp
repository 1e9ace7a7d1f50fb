#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "edgevo/canny.hpp"
#include "edgevo/config.hpp"
#include "edgevo/corner.hpp"
#include "edgevo/dataset.hpp"
#include "edgevo/errors.hpp"
#include "edgevo/metrics.hpp"
#include "edgevo/synthetic.hpp"
#include "edgevo/tracker.hpp"

namespace fs = std::filesystem;
using namespace edgevo;

namespace {

// Exit codes: 0 ok, 2 config, 3 dataset, 4 tracking, 5 evaluation.
int exit_code_for(const Error& e, bool eval_context) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
      return 2;
    case ErrorCode::TrackingLost:
    case ErrorCode::NoValidPoints:
    case ErrorCode::TooFewPoints:
    case ErrorCode::SingularNormalEquations:
    case ErrorCode::Diverged:
      return 4;
    default:
      return eval_context ? 5 : 3;
  }
}

RunConfig make_config(const std::string& config_path, const std::vector<std::string>& overrides) {
  RunConfig config;
  if (!config_path.empty()) config = load_run_config(config_path);
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError, "--set expects key=value, got '" + item + "'");
    apply_override(config, item.substr(0, eq), item.substr(eq + 1));
  }
  config.validate();
  return config;
}

WireScene demo_scene() {
  WireScene scene = make_cube_scene(1.2, Vec3(0, 0, 2.6), true);
  const WireScene small = make_cube_scene(0.5, Vec3(-0.65, 0.3, 3.3), false);
  scene.segments.insert(scene.segments.end(), small.segments.begin(), small.segments.end());
  return scene;
}

SyntheticSequence demo_sequence(const RunConfig& config) {
  SyntheticOptions options;
  options.edge_jitter_sigma = config.demo_noise;
  options.seed = 20240601;
  const auto path = make_wobble_path(config.demo_frames, 0.008, 0.2 * M_PI / 180.0);
  return generate_synthetic_sequence(demo_scene(), path, config.intrinsics, options);
}

struct SequenceSource {
  CameraIntrinsics intrinsics;
  FrameStream frames;
  EdgeSourceFn edges;
  size_t size = 0;
};

SequenceSource open_sequence(const RunConfig& config, ExecMode mode) {
  SequenceSource source;
  source.intrinsics = config.intrinsics;

  if (config.dataset.empty()) {
    auto synthetic = std::make_shared<SyntheticSequence>(demo_sequence(config));
    source.size = synthetic->frames.size();
    auto index = std::make_shared<size_t>(0);
    source.frames = [synthetic, index]() -> std::optional<Frame> {
      if (*index >= synthetic->frames.size()) return std::nullopt;
      return synthetic->frames[(*index)++].frame;
    };
    source.edges = [synthetic](const Frame&, int i) { return synthetic->frames[i].edges; };
    return source;
  }

  const fs::path root(config.dataset);
  if (!fs::is_directory(root))
    throw Error(ErrorCode::DatasetError, "dataset directory not found: " + config.dataset);
  const auto rgb_index = read_index_file((root / "rgb.txt").string());
  const auto depth_index = read_index_file((root / "depth.txt").string());
  auto pairs = std::make_shared<std::vector<std::pair<TimedPath, TimedPath>>>(
      associate_frames(rgb_index, depth_index, config.assoc_max_dt));
  if (pairs->empty()) throw Error(ErrorCode::DatasetError, "no rgb/depth pairs within max_dt");
  source.size = pairs->size();

  const CameraIntrinsics intrinsics = config.intrinsics;
  auto index = std::make_shared<size_t>(0);
  const std::string root_str = root.string();
  source.frames = [pairs, index, intrinsics, root_str]() -> std::optional<Frame> {
    if (*index >= pairs->size()) return std::nullopt;
    const auto& [rgb, depth] = (*pairs)[(*index)++];
    Frame frame = load_frame(root_str + "/" + rgb.path, root_str + "/" + depth.path, intrinsics);
    frame.timestamp = rgb.timestamp;
    return frame;
  };

  if (config.edge_source == "canny") {
    const CannyConfig canny = config.canny;
    source.edges = [canny, mode](const Frame& frame, int) {
      return detect_edges_canny(frame.intensity, canny, mode);
    };
  } else {
    const int threshold = config.edge_binarize_threshold;
    source.edges = [root_str, intrinsics, threshold](const Frame& frame, int) {
      const std::string name = fs::path(frame.rgb_path).filename().string();
      return load_external_edge_map(root_str + "/edges/" + name, intrinsics.width,
                                    intrinsics.height, threshold);
    };
  }
  return source;
}

void write_diagnostics(const std::vector<FrameDiagnostics>& diagnostics,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::DatasetError, "cannot open " + path + " for writing");
  char buf[256];
  for (const FrameDiagnostics& d : diagnostics) {
    std::snprintf(buf, sizeof(buf),
                  "{\"frame\":%d,\"t\":%.6f,\"valid_ratio\":%.6f,\"final_cost\":%.9g,\"iters\":[",
                  d.index, d.timestamp, d.valid_ratio, d.final_cost);
    out << buf;
    for (size_t i = 0; i < d.iterations_per_level.size(); ++i)
      out << (i ? "," : "") << d.iterations_per_level[i];
    out << "],\"keyframe\":" << (d.keyframe ? "true" : "false")
        << ",\"lost\":" << (d.lost ? "true" : "false") << "}\n";
  }
}

void print_report(const MetricReport& report, bool is_rpe, bool frame_mode) {
  char buf[64];
  const auto line = [&](const char* key, double value) {
    std::snprintf(buf, sizeof(buf), "%s %.6f", key, value);
    std::cout << buf << "\n";
  };
  line("rmse", report.rmse);
  line("mean", report.mean);
  line("median", report.median);
  line("max", report.max);
  if (is_rpe) line("rot_rmse", report.rot_rmse);
  std::cout << "count " << report.count << "\n";
  if (is_rpe) {
    if (frame_mode)
      std::cout << "delta_frames " << static_cast<int>(report.dt) << "\n";
    else
      line("delta", report.dt);
  }
}

void dump_samples(const std::vector<MetricSample>& samples, const std::string& path,
                  bool with_rot) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::DatasetError, "cannot open " + path + " for writing");
  char buf[128];
  for (const MetricSample& s : samples) {
    if (with_rot)
      std::snprintf(buf, sizeof(buf), "%.6f %.6f %.6f\n", s.timestamp, s.trans_error,
                    s.rot_error);
    else
      std::snprintf(buf, sizeof(buf), "%.6f %.6f\n", s.timestamp, s.trans_error);
    out << buf;
  }
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            bool serial) {
  const RunConfig config = make_config(config_path, overrides);
  const ExecMode mode = serial ? ExecMode::Serial : ExecMode::Parallel;
  SequenceSource source = open_sequence(config, mode);

  const TrackResult result =
      track_sequence(source.frames, source.edges, config.intrinsics, config.tracker, mode);
  write_trajectory(result.trajectory, config.trajectory_path);
  if (!config.diagnostics_path.empty())
    write_diagnostics(result.diagnostics, config.diagnostics_path);

  int lost = 0;
  int keyframes = 0;
  for (const FrameDiagnostics& d : result.diagnostics) {
    lost += d.lost;
    keyframes += d.keyframe;
  }
  std::cout << "frames " << result.trajectory.size() << "\nkeyframes " << keyframes
            << "\nlost " << lost << "\ntrajectory " << config.trajectory_path << "\n";
  return 0;
}

int cmd_demo(const std::string& out_dir, const std::string& config_path,
             const std::vector<std::string>& overrides, bool serial) {
  RunConfig config = make_config(config_path, overrides);
  const ExecMode mode = serial ? ExecMode::Serial : ExecMode::Parallel;
  const SyntheticSequence sequence = demo_sequence(config);

  const fs::path root(out_dir);
  fs::create_directories(root / "rgb");
  fs::create_directories(root / "depth");
  fs::create_directories(root / "edges");

  std::ofstream rgb_index(root / "rgb.txt");
  std::ofstream depth_index(root / "depth.txt");
  rgb_index << "# timestamp filename\n";
  depth_index << "# timestamp filename\n";
  char name[64];
  for (const SyntheticFrame& sf : sequence.frames) {
    std::snprintf(name, sizeof(name), "%.6f.png", sf.frame.timestamp);
    const int w = sf.frame.intensity.width();
    const int h = sf.frame.intensity.height();
    ImageU8 gray(w, h);
    Image<std::uint16_t> depth(w, h);
    ImageU8 edges(w, h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        gray.at(x, y) = static_cast<std::uint8_t>(
            std::lround(std::clamp(sf.frame.intensity.at(x, y), 0.f, 1.f) * 255.f));
        const double raw = sf.frame.depth.at(x, y) * config.intrinsics.depth_scale;
        depth.at(x, y) = static_cast<std::uint16_t>(std::lround(std::clamp(raw, 0.0, 65535.0)));
        edges.at(x, y) = sf.edges.is_edge(x, y) ? 255 : 0;
      }
    }
    write_gray8(gray, (root / "rgb" / name).string());
    write_gray16(depth, (root / "depth" / name).string());
    write_gray8(edges, (root / "edges" / name).string());
    char ts[32];
    std::snprintf(ts, sizeof(ts), "%.6f", sf.frame.timestamp);
    rgb_index << ts << " rgb/" << name << "\n";
    depth_index << ts << " depth/" << name << "\n";
  }
  write_trajectory(sequence.ground_truth, (root / "groundtruth.txt").string());

  {
    std::ofstream conf(root / "demo.conf");
    conf << "dataset = " << fs::absolute(root).string() << "\n"
         << "edge_source = external\n"
         << "edge_binarize_threshold = 128\n"
         << "trajectory_path = " << (fs::absolute(root) / "trajectory.txt").string() << "\n";
  }

  // track in memory with the generator's masks
  auto index = std::make_shared<size_t>(0);
  const auto* frames_ptr = &sequence.frames;
  FrameStream stream = [frames_ptr, index]() -> std::optional<Frame> {
    if (*index >= frames_ptr->size()) return std::nullopt;
    return (*frames_ptr)[(*index)++].frame;
  };
  EdgeSourceFn edge_fn = [frames_ptr](const Frame&, int i) { return (*frames_ptr)[i].edges; };

  const TrackResult result =
      track_sequence(stream, edge_fn, config.intrinsics, config.tracker, mode);
  write_trajectory(result.trajectory, (root / "trajectory.txt").string());
  write_diagnostics(result.diagnostics, (root / "diagnostics.jsonl").string());

  const PosePairs pairs =
      associate_trajectories(sequence.ground_truth, result.trajectory, 1e-6);
  const MetricReport report = ate(pairs);
  std::cout << "demo dataset written to " << out_dir << "\n";
  print_report(report, false, false);
  return 0;
}

int cmd_edges(const std::string& config_path, const std::vector<std::string>& overrides,
              int frame_index, const std::string& out_dir, bool serial) {
  const RunConfig config = make_config(config_path, overrides);
  const ExecMode mode = serial ? ExecMode::Serial : ExecMode::Parallel;
  SequenceSource source = open_sequence(config, mode);

  if (frame_index < 0 || static_cast<size_t>(frame_index) >= source.size)
    throw Error(ErrorCode::IndexOutOfRange,
                "frame " + std::to_string(frame_index) + " of " + std::to_string(source.size));

  Frame frame;
  for (int i = 0; i <= frame_index; ++i) frame = *source.frames();
  const EdgeMap raw = source.edges(frame, frame_index);
  const CornerOptimization opt = corner_optimize(raw, config.tracker.corner, mode);

  fs::create_directories(out_dir);
  const int w = raw.width();
  const int h = raw.height();
  ImageU8 edge_img(w, h, 0), overlay(w, h, 0), augmented_img(w, h, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      edge_img.at(x, y) = raw.is_edge(x, y) ? 255 : 0;
      overlay.at(x, y) = raw.is_edge(x, y) ? 80 : 0;
      augmented_img.at(x, y) = opt.augmented.is_edge(x, y) ? 255 : 0;
    }
  }
  for (const Corner& c : opt.corners) {
    for (int d = -2; d <= 2; ++d) {
      if (overlay.in_bounds(c.x + d, c.y)) overlay.at(c.x + d, c.y) = 255;
      if (overlay.in_bounds(c.x, c.y + d)) overlay.at(c.x, c.y + d) = 255;
    }
  }

  char name[64];
  std::snprintf(name, sizeof(name), "frame_%06d", frame_index);
  const fs::path base = fs::path(out_dir) / name;
  write_gray8(edge_img, base.string() + "_edges.png");
  write_gray8(overlay, base.string() + "_corners.png");
  write_gray8(augmented_img, base.string() + "_augmented.png");
  std::cout << "wrote " << base.string() << "_{edges,corners,augmented}.png ("
            << opt.corners.size() << " corners)\n";
  return 0;
}

int cmd_eval(bool is_rpe, const std::string& gt_path, const std::string& est_path, double delta,
             int delta_frames, double max_dt, const std::string& dump_path) {
  const Trajectory reference = read_trajectory(gt_path);
  const Trajectory estimate = read_trajectory(est_path);
  const PosePairs pairs = associate_trajectories(reference, estimate, max_dt);

  std::vector<MetricSample> samples;
  MetricReport report;
  bool frame_mode = false;
  if (is_rpe) {
    if (delta_frames > 0) {
      report = rpe_frames(pairs, delta_frames, &samples);
      frame_mode = true;
    } else {
      report = rpe(pairs, delta, &samples);
    }
  } else {
    report = ate(pairs, &samples);
  }
  print_report(report, is_rpe, frame_mode);
  if (!dump_path.empty()) dump_samples(samples, dump_path, is_rpe);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge-direct RGB-D visual odometry and TUM-protocol trajectory evaluation"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "edgevo_out", gt_path, est_path, dump_path;
  std::vector<std::string> overrides;
  bool serial = false;
  int frame_index = 0, delta_frames = 0;
  double delta = 1.0, max_dt = 0.02;

  auto* run = app.add_subcommand("run", "track a sequence and write its trajectory");
  run->add_option("--config", config_path, "config file (flat key = value)");
  run->add_option("--set", overrides, "override a config key (key=value)");
  run->add_flag("--serial", serial, "run kernels on the serial reference path");

  auto* demo = app.add_subcommand("demo", "synthetic end-to-end demo; exports a mini dataset");
  demo->add_option("--out", out_dir, "output directory");
  demo->add_option("--config", config_path, "config file");
  demo->add_option("--set", overrides, "override a config key (key=value)");
  demo->add_flag("--serial", serial, "run kernels on the serial reference path");

  auto* edges = app.add_subcommand("edges", "dump edge map, corner overlay and augmented map");
  edges->add_option("--config", config_path, "config file");
  edges->add_option("--set", overrides, "override a config key (key=value)");
  edges->add_option("--frame", frame_index, "frame index")->required();
  edges->add_option("--out", out_dir, "output directory");
  edges->add_flag("--serial", serial, "run kernels on the serial reference path");

  auto* eval_rpe = app.add_subcommand("eval-rpe", "relative pose error of estimate vs ground truth");
  eval_rpe->add_option("groundtruth", gt_path)->required();
  eval_rpe->add_option("estimate", est_path)->required();
  eval_rpe->add_option("--delta", delta, "interval in seconds (default 1.0)");
  eval_rpe->add_option("--delta-frames", delta_frames, "frame-indexed interval instead");
  eval_rpe->add_option("--max-dt", max_dt, "association tolerance (s)");
  eval_rpe->add_option("--dump", dump_path, "write per-sample errors to this file");

  auto* eval_ate = app.add_subcommand("eval-ate", "absolute trajectory error after alignment");
  eval_ate->add_option("groundtruth", gt_path)->required();
  eval_ate->add_option("estimate", est_path)->required();
  eval_ate->add_option("--max-dt", max_dt, "association tolerance (s)");
  eval_ate->add_option("--dump", dump_path, "write per-sample errors to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const bool eval_context = eval_rpe->parsed() || eval_ate->parsed();
  try {
    if (run->parsed()) return cmd_run(config_path, overrides, serial);
    if (demo->parsed()) return cmd_demo(out_dir, config_path, overrides, serial);
    if (edges->parsed()) return cmd_edges(config_path, overrides, frame_index, out_dir, serial);
    if (eval_rpe->parsed())
      return cmd_eval(true, gt_path, est_path, delta, delta_frames, max_dt, dump_path);
    if (eval_ate->parsed()) return cmd_eval(false, gt_path, est_path, delta, 0, max_dt, dump_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e, eval_context);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
