#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "edgevo/camera.hpp"
#include "edgevo/errors.hpp"
#include "edgevo/pyramid.hpp"
#include "edgevo/se3.hpp"
#include "testref/oracles.hpp"

using namespace edgevo;

TEST_CASE("se3_exp basics") {
  CHECK(se3_exp(Twist::Zero()).R.isApprox(Mat3::Identity(), 1e-15));
  CHECK(se3_exp(Twist::Zero()).t.norm() == 0.0);

  Twist pure_translation;
  pure_translation << 1, 2, 3, 0, 0, 0;
  const Pose p = se3_exp(pure_translation);
  CHECK(p.R.isApprox(Mat3::Identity(), 1e-15));
  CHECK(p.t.isApprox(Vec3(1, 2, 3), 1e-15));

  Twist quarter_turn;
  quarter_turn << 0, 0, 0, 0, 0, M_PI / 2;
  const Pose z90 = se3_exp(quarter_turn);
  Mat3 expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;  // Rodrigues by hand
  CHECK(z90.R.isApprox(expected, 1e-12));
  CHECK(z90.t.norm() < 1e-15);
}

TEST_CASE("se3 exp/log roundtrip") {
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Twist xi = testref::random_twist(rng, 5.0, 3.0 / std::sqrt(3.0));
    const Pose pose = se3_exp(xi);
    CHECK(pose.is_valid_rotation(1e-9));
    const Twist back = se3_log(pose);
    worst = std::max(worst, (back - xi).norm());
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("se3_log identity and singularity") {
  CHECK(se3_log(Pose::identity()).norm() == 0.0);

  Twist near_pi;
  near_pi << 0, 0, 0, M_PI - 1e-9, 0, 0;
  const Pose pose = se3_exp(near_pi);
  CHECK_THROWS_AS(se3_log(pose), Error);
}

TEST_CASE("projection") {
  CameraIntrinsics k{525.0, 525.0, 319.5, 239.5, 640, 480, 5000.0};

  const auto center = project(Vec3(0, 0, 2), k);
  REQUIRE(center.has_value());
  CHECK(center->x() == doctest::Approx(319.5).epsilon(1e-12));
  CHECK(center->y() == doctest::Approx(239.5).epsilon(1e-12));

  const auto off_axis = project(Vec3(1, 0, 2), k);
  REQUIRE(off_axis.has_value());
  CHECK(off_axis->x() == doctest::Approx(582.0).epsilon(1e-12));

  CHECK(!project(Vec3(0, 0, 0), k).has_value());
  CHECK(!project(Vec3(0, 0, -1), k).has_value());
}

TEST_CASE("backprojection inverts projection") {
  CameraIntrinsics k{525.0, 525.0, 319.5, 239.5, 640, 480, 5000.0};
  CHECK(backproject(k.cx, k.cy, 1.0, k).isApprox(Vec3(0, 0, 1), 1e-15));
  CHECK_THROWS_AS(backproject(10, 10, 0.0, k), Error);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  double worst = 0;
  for (int i = 0; i < 500; ++i) {
    const double u = un(rng) * (k.width - 1);
    const double v = un(rng) * (k.height - 1);
    const double d = 0.2 + 5.0 * un(rng);
    const auto uv = project(backproject(u, v, d, k), k);
    REQUIRE(uv.has_value());
    worst = std::max({worst, std::abs(uv->x() - u), std::abs(uv->y() - v)});

    const Vec3 p(2 * un(rng) - 1, 2 * un(rng) - 1, 0.5 + 3 * un(rng));
    const auto proj = project(p, k);
    REQUIRE(proj.has_value());
    worst = std::max(worst, (backproject(proj->x(), proj->y(), p.z(), k) - p).norm());
  }
  CHECK(worst < 1e-12);
}

namespace {

Frame make_frame(int w, int h) {
  Frame frame;
  frame.timestamp = 0;
  frame.intensity = ImageF(w, h, 0.5f);
  frame.depth = ImageF(w, h, 0.f);
  return frame;
}

}  // namespace

TEST_CASE("pyramid dimensions and pooling rules") {
  CameraIntrinsics k{525.0, 525.0, 319.5, 239.5, 640, 480, 5000.0};
  Frame frame = make_frame(640, 480);
  // one valid depth in a 2x2 block
  frame.depth.at(10, 10) = 2.0f;

  EdgeMap edges(640, 480, EdgeSource::Canny);
  edges.set(10, 10);
  edges.set(333, 241);

  const auto pyramid = build_pyramid(frame, edges, k, 4);
  REQUIRE(pyramid.size() == 4);
  CHECK(pyramid[0].intensity.width() == 640);
  CHECK(pyramid[1].intensity.width() == 320);
  CHECK(pyramid[2].intensity.width() == 160);
  CHECK(pyramid[3].intensity.width() == 80);
  CHECK(pyramid[3].intensity.height() == 60);
  CHECK(pyramid[1].intrinsics.fx == doctest::Approx(262.5));
  CHECK(pyramid[1].intrinsics.cx == doctest::Approx(159.75));

  // depth pooling: mean of valid children only
  CHECK(pyramid[1].depth.at(5, 5) == doctest::Approx(2.0));
  // edge OR-pooling: both edges survive at every level
  for (const auto& level : pyramid) CHECK(level.edges.edge_count() >= 1);
  CHECK(pyramid[1].edges.is_edge(5, 5));
  CHECK(pyramid[3].edges.is_edge(1, 1));

  SUBCASE("single level pyramid is the input") {
    const auto single = build_pyramid(frame, edges, k, 1);
    REQUIRE(single.size() == 1);
    CHECK(single[0].intensity == frame.intensity);
    CHECK(single[0].edges.mask == edges.mask);
  }

  SUBCASE("too many levels") {
    CHECK_THROWS_AS(build_pyramid(frame, edges, k, 5), Error);  // 40x30 < 32x32
  }
}

TEST_CASE("pyramid edge masks are nested under pooling") {
  CameraIntrinsics k{100.0, 100.0, 63.5, 47.5, 128, 96, 5000.0};
  Frame frame = make_frame(128, 96);
  std::mt19937_64 rng(3);
  EdgeMap edges = testref::random_mask(rng, 128, 96, 0.05);
  if (edges.edge_count() == 0) edges.set(4, 4);

  const auto pyramid = build_pyramid(frame, edges, k, 2);
  for (int y = 0; y < pyramid[1].edges.height(); ++y) {
    for (int x = 0; x < pyramid[1].edges.width(); ++x) {
      if (!pyramid[1].edges.is_edge(x, y)) continue;
      bool has_ancestor = false;
      for (int dy = 0; dy < 2 && !has_ancestor; ++dy)
        for (int dx = 0; dx < 2 && !has_ancestor; ++dx) {
          const int px = 2 * x + dx;
          const int py = 2 * y + dy;
          if (px < 128 && py < 96 && pyramid[0].edges.is_edge(px, py)) has_ancestor = true;
        }
      CHECK(has_ancestor);
    }
  }
}

TEST_CASE("pyramid serial matches parallel") {
  CameraIntrinsics k{100.0, 100.0, 63.5, 47.5, 128, 96, 5000.0};
  Frame frame = make_frame(128, 96);
  std::mt19937_64 rng(5);
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 128; ++x) {
      frame.intensity.at(x, y) = static_cast<float>((x * 13 + y * 7) % 97) / 97.f;
      frame.depth.at(x, y) = (x + y) % 5 == 0 ? 0.f : 1.f + 0.01f * x;
    }
  EdgeMap edges = testref::random_mask(rng, 128, 96, 0.08);
  edges.set(0, 0);

  const auto par = build_pyramid(frame, edges, k, 2, ExecMode::Parallel);
  const auto ser = build_pyramid(frame, edges, k, 2, ExecMode::Serial);
  for (int l = 0; l < 2; ++l) {
    CHECK(par[l].intensity == ser[l].intensity);
    CHECK(par[l].depth == ser[l].depth);
    CHECK(par[l].edges.mask == ser[l].edges.mask);
    CHECK(par[l].dist.dist == ser[l].dist.dist);
    CHECK(par[l].dist.grad_x == ser[l].dist.grad_x);
  }
}

TEST_CASE("quaternion conversion is stable") {
  std::mt19937_64 rng(13);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const Pose pose = testref::random_pose(rng, 1.0, 1.5);
    const Mat3 back = from_quaternion(to_quaternion(pose.R));
    worst = std::max(worst, (back - pose.R).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-12);
}
