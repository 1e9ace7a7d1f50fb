#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "edgevo/dataset.hpp"
#include "edgevo/errors.hpp"
#include "testref/oracles.hpp"

using namespace edgevo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "edgevo_dataset_tests";
  fs::create_directories(dir);
  return dir;
}

std::vector<TimedPath> stamps(std::initializer_list<double> times) {
  std::vector<TimedPath> list;
  int i = 0;
  for (double t : times) list.push_back({t, "f" + std::to_string(i++) + ".png"});
  return list;
}

void write_ppm(const fs::path& path, int w, int h, std::uint8_t r, std::uint8_t g,
               std::uint8_t b) {
  std::ofstream out(path, std::ios::binary);
  out << "P6\n" << w << " " << h << "\n255\n";
  for (int i = 0; i < w * h; ++i) {
    out.put(static_cast<char>(r));
    out.put(static_cast<char>(g));
    out.put(static_cast<char>(b));
  }
}

}  // namespace

TEST_CASE("associate_frames") {
  SUBCASE("nearest match within tolerance") {
    const auto pairs = associate_frames(stamps({1.00, 2.00}), stamps({1.01, 2.02}), 0.02);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].first.timestamp == 1.00);
    CHECK(pairs[0].second.timestamp == 1.01);
    CHECK(pairs[1].second.timestamp == 2.02);
  }
  SUBCASE("exact single match") {
    const auto pairs = associate_frames(stamps({1.0}), stamps({1.0}), 0.5);
    REQUIRE(pairs.size() == 1);
  }
  SUBCASE("outside tolerance") {
    CHECK(associate_frames(stamps({1.0}), stamps({1.5}), 0.02).empty());
  }
  SUBCASE("empty inputs throw") {
    CHECK_THROWS_AS(associate_frames({}, stamps({1.0}), 0.02), Error);
    CHECK_THROWS_AS(associate_frames(stamps({1.0}), {}, 0.02), Error);
  }
  SUBCASE("each entry used at most once") {
    const auto pairs = associate_frames(stamps({1.00, 1.005}), stamps({1.002}), 0.02);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].first.timestamp == 1.00);  // closer of the two
  }
  SUBCASE("association is symmetric for interleaved streams") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> jitter(0.001, 0.015);
    std::vector<TimedPath> a, b;
    double t = 0;
    for (int i = 0; i < 40; ++i) {
      t += 0.033;
      a.push_back({t, "a"});
      b.push_back({t + jitter(rng), "b"});
    }
    const auto ab = associate_frames(a, b, 0.02);
    const auto ba = associate_frames(b, a, 0.02);
    REQUIRE(ab.size() == ba.size());
    std::set<std::pair<double, double>> set_ab, set_ba;
    for (const auto& [x, y] : ab) set_ab.insert({x.timestamp, y.timestamp});
    for (const auto& [x, y] : ba) set_ba.insert({y.timestamp, x.timestamp});
    CHECK(set_ab == set_ba);
  }
}

TEST_CASE("read_index_file skips comments") {
  const fs::path dir = temp_dir();
  const fs::path index = dir / "rgb.txt";
  {
    std::ofstream out(index);
    out << "# comment line\n\n1.5 rgb/a.png\n2.5 rgb/b.png\n";
  }
  const auto entries = read_index_file(index.string());
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].timestamp == 1.5);
  CHECK(entries[1].path == "rgb/b.png");
}

TEST_CASE("load_frame") {
  const fs::path dir = temp_dir();
  CameraIntrinsics k{10.0, 10.0, 4.0, 3.0, 8, 6, 5000.0};

  Image<std::uint16_t> depth_raw(8, 6, 0);
  depth_raw.at(2, 2) = 5000;  // exactly one meter
  depth_raw.at(3, 3) = 2500;
  write_gray16(depth_raw, (dir / "depth.png").string());

  SUBCASE("gray rgb and depth scaling") {
    ImageU8 gray(8, 6, 128);
    write_gray8(gray, (dir / "gray.png").string());
    const Frame frame = load_frame((dir / "gray.png").string(), (dir / "depth.png").string(), k);
    CHECK(frame.intensity.at(0, 0) == doctest::Approx(128.0 / 255.0));
    CHECK(frame.depth.at(2, 2) == doctest::Approx(1.0));
    CHECK(frame.depth.at(3, 3) == doctest::Approx(0.5));
    CHECK(frame.depth.at(0, 0) == 0.f);  // raw 0 stays invalid
  }

  SUBCASE("color luma weights") {
    write_ppm(dir / "red.ppm", 8, 6, 255, 0, 0);
    const Frame frame = load_frame((dir / "red.ppm").string(), (dir / "depth.png").string(), k);
    CHECK(frame.intensity.at(4, 4) == doctest::Approx(0.299).epsilon(1e-6));

    write_ppm(dir / "green.ppm", 8, 6, 0, 255, 0);
    const Frame g = load_frame((dir / "green.ppm").string(), (dir / "depth.png").string(), k);
    CHECK(g.intensity.at(4, 4) == doctest::Approx(0.587).epsilon(1e-6));
  }

  SUBCASE("dimension mismatch") {
    ImageU8 wrong(4, 3, 0);
    write_gray8(wrong, (dir / "small.png").string());
    CHECK_THROWS_AS(load_frame((dir / "small.png").string(), (dir / "depth.png").string(), k),
                    Error);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_frame((dir / "nope.png").string(), (dir / "depth.png").string(), k),
                    Error);
  }
}

TEST_CASE("loaded frames satisfy their invariants on fuzzed images") {
  const fs::path dir = temp_dir();
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<int> dim(8, 40);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> raw16(0, 65535);

  for (int trial = 0; trial < 20; ++trial) {
    const int w = dim(rng);
    const int h = dim(rng);
    CameraIntrinsics k{50.0, 50.0, w / 2.0, h / 2.0, w, h, 5000.0};

    ImageU8 gray(w, h);
    Image<std::uint16_t> depth(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        gray.at(x, y) = static_cast<std::uint8_t>(byte(rng));
        depth.at(x, y) = static_cast<std::uint16_t>(raw16(rng));
      }
    const std::string gray_path = (dir / "fuzz_gray.png").string();
    const std::string depth_path = (dir / "fuzz_depth.png").string();
    write_gray8(gray, gray_path);
    write_gray16(depth, depth_path);

    const Frame frame = load_frame(gray_path, depth_path, k);
    REQUIRE(frame.intensity.width() == w);
    REQUIRE(frame.intensity.height() == h);
    REQUIRE(frame.depth.width() == w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        CHECK(frame.intensity.at(x, y) >= 0.f);
        CHECK(frame.intensity.at(x, y) <= 1.f);
        CHECK(frame.depth.at(x, y) >= 0.f);
        CHECK((depth.at(x, y) == 0) == (frame.depth.at(x, y) == 0.f));
      }
  }
}

TEST_CASE("external edge map binarization") {
  const fs::path dir = temp_dir();
  ImageU8 img(8, 6, 0);
  img.at(1, 1) = 255;
  img.at(2, 2) = 128;
  img.at(3, 3) = 127;
  write_gray8(img, (dir / "edges.png").string());

  const EdgeMap edges = load_external_edge_map((dir / "edges.png").string(), 8, 6, 128);
  CHECK(edges.source == EdgeSource::External);
  CHECK(edges.is_edge(1, 1));
  CHECK(edges.is_edge(2, 2));       // >= threshold
  CHECK(!edges.is_edge(3, 3));      // strictly below
  CHECK(edges.edge_count() == 2);

  CHECK_THROWS_AS(load_external_edge_map((dir / "edges.png").string(), 16, 12, 128), Error);
}

TEST_CASE("trajectory io") {
  const fs::path dir = temp_dir();
  const fs::path file = dir / "traj.txt";

  SUBCASE("roundtrip of random poses") {
    std::mt19937_64 rng(53);
    Trajectory trajectory;
    for (int i = 0; i < 100; ++i)
      trajectory.push_back({0.1 * i, testref::random_pose(rng, 2.0, 1.5)});
    write_trajectory(trajectory, file.string());
    const Trajectory back = read_trajectory(file.string());
    REQUIRE(back.size() == trajectory.size());
    double worst = 0;
    for (size_t i = 0; i < back.size(); ++i) {
      worst = std::max(worst, (back[i].pose.R - trajectory[i].pose.R).cwiseAbs().maxCoeff());
      worst = std::max(worst, (back[i].pose.t - trajectory[i].pose.t).cwiseAbs().maxCoeff());
      CHECK(back[i].timestamp == doctest::Approx(trajectory[i].timestamp).epsilon(1e-12));
    }
    CHECK(worst < 1e-9);
  }

  SUBCASE("identity formatting") {
    write_trajectory({{0.0, Pose::identity()}}, file.string());
    std::ifstream in(file);
    std::string comment, line;
    std::getline(in, comment);
    std::getline(in, line);
    CHECK(line.substr(0, 8) == "0.000000");
    CHECK(line.find("1.000000000000") != std::string::npos);  // qw
  }

  SUBCASE("short line is a parse error") {
    std::ofstream(file) << "1.0 0 0 0 0 0 0\n";
    CHECK_THROWS_AS(read_trajectory(file.string()), Error);
  }

  SUBCASE("trailing field is a parse error") {
    std::ofstream(file) << "1.0 0 0 0 0 0 0 1 junk\n";
    CHECK_THROWS_AS(read_trajectory(file.string()), Error);
  }

  SUBCASE("non-monotonic timestamps rejected on read") {
    std::ofstream(file) << "2.0 0 0 0 0 0 0 1\n1.0 0 0 0 0 0 0 1\n";
    CHECK_THROWS_AS(read_trajectory(file.string()), Error);
  }

  SUBCASE("non-monotonic timestamps rejected on write") {
    const Trajectory bad = {{2.0, Pose::identity()}, {1.0, Pose::identity()}};
    CHECK_THROWS_AS(write_trajectory(bad, file.string()), Error);
  }
}
