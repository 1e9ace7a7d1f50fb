#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "edgevo/config.hpp"
#include "edgevo/dataset.hpp"
#include "edgevo/errors.hpp"
#include "testref/oracles.hpp"

using namespace edgevo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "edgevo_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EDGEVO_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const fs::path dir = temp_dir();
  const fs::path file = dir / "test.conf";

  SUBCASE("defaults plus overrides") {
    std::ofstream(file) << "# a comment\n"
                        << "fx = 517.3\n"
                        << "huber_theta = auto\n"
                        << "keyframe_rot_threshold_deg = 12  # inline comment\n"
                        << "edge_source = external\n";
    const RunConfig config = load_run_config(file.string());
    CHECK(config.intrinsics.fx == 517.3);
    CHECK(config.tracker.robust.huber_theta == 0.0);
    CHECK(config.tracker.keyframe.rot_threshold == doctest::Approx(12 * M_PI / 180));
    CHECK(config.edge_source == "external");
    CHECK(config.tracker.pyramid_levels == 4);  // untouched default
  }

  SUBCASE("unknown key") {
    std::ofstream(file) << "does_not_exist = 5\n";
    CHECK_THROWS_AS(load_run_config(file.string()), Error);
  }

  SUBCASE("malformed line") {
    std::ofstream(file) << "just words\n";
    CHECK_THROWS_AS(load_run_config(file.string()), Error);
  }

  SUBCASE("invalid values rejected by validation") {
    std::ofstream(file) << "canny_low = 150\ncanny_high = 50\n";
    CHECK_THROWS_AS(load_run_config(file.string()), Error);
  }

  SUBCASE("numeric override") {
    RunConfig config;
    apply_override(config, "pyramid_levels", "3");
    CHECK(config.tracker.pyramid_levels == 3);
    CHECK_THROWS_AS(apply_override(config, "pyramid_levels", "many"), Error);
  }
}

TEST_CASE("cli exit codes") {
  const fs::path dir = temp_dir();

  SUBCASE("eval-ate of a file against itself") {
    std::mt19937_64 rng(97);
    Trajectory trajectory;
    Pose pose;
    for (int i = 0; i < 30; ++i) {
      trajectory.push_back({0.1 * i, pose});
      pose = pose * testref::random_pose(rng, 0.05, 0.02);
    }
    const fs::path traj = dir / "self.txt";
    write_trajectory(trajectory, traj.string());
    CHECK(run_cli("eval-ate " + traj.string() + " " + traj.string()) == 0);
  }

  SUBCASE("malformed estimate file") {
    const fs::path good = dir / "good.txt";
    const fs::path bad = dir / "bad.txt";
    write_trajectory({{0.0, Pose::identity()}, {1.0, Pose::identity()}}, good.string());
    std::ofstream(bad) << "0.0 1 2 3\n";
    CHECK(run_cli("eval-ate " + good.string() + " " + bad.string()) == 5);
  }

  SUBCASE("missing dataset directory") {
    const fs::path conf = dir / "missing.conf";
    std::ofstream(conf) << "dataset = /definitely/not/here\n";
    CHECK(run_cli("run --config " + conf.string()) == 3);
  }

  SUBCASE("bad config") {
    const fs::path conf = dir / "bad.conf";
    std::ofstream(conf) << "nonsense_key = 1\n";
    CHECK(run_cli("run --config " + conf.string()) == 2);
  }

  SUBCASE("edges frame index out of range") {
    CHECK(run_cli("edges --frame 999999 --out " + (dir / "edges_out").string() +
                  " --set demo_frames=3") == 3);
  }
}

TEST_CASE("synthetic run is byte-identical across reruns") {
  const fs::path dir = temp_dir();
  const fs::path t1 = dir / "run1.txt";
  const fs::path t2 = dir / "run2.txt";
  const std::string base =
      "run --set demo_frames=6 --set pyramid_levels=2 --set trajectory_path=";
  REQUIRE(run_cli(base + t1.string()) == 0);
  REQUIRE(run_cli(base + t2.string()) == 0);
  const std::string a = read_file(t1);
  const std::string b = read_file(t2);
  CHECK(!a.empty());
  CHECK(a == b);
}

TEST_CASE("edges subcommand writes the three debug images") {
  const fs::path dir = temp_dir() / "edges_dump";
  fs::remove_all(dir);
  REQUIRE(run_cli("edges --frame 0 --out " + dir.string() + " --set demo_frames=2") == 0);
  CHECK(fs::exists(dir / "frame_000000_edges.png"));
  CHECK(fs::exists(dir / "frame_000000_corners.png"));
  CHECK(fs::exists(dir / "frame_000000_augmented.png"));
}
