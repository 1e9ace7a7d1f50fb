// Serial reference vs OpenMP path for the data-parallel kernels.
// Run with --benchmark_filter=... to narrow down; arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "edgevo/canny.hpp"
#include "edgevo/corner.hpp"
#include "edgevo/distance_transform.hpp"
#include "edgevo/pyramid.hpp"
#include "edgevo/synthetic.hpp"
#include "edgevo/tracker.hpp"

using namespace edgevo;

namespace {

const CameraIntrinsics kIntrinsics{525.0, 525.0, 319.5, 239.5, 640, 480, 5000.0};

const SyntheticFrame& bench_frame() {
  static const SyntheticFrame frame = [] {
    WireScene scene = make_cube_scene(1.2, Vec3(0, 0, 2.6), true);
    const WireScene small = make_cube_scene(0.5, Vec3(-0.65, 0.3, 3.3), false);
    scene.segments.insert(scene.segments.end(), small.segments.begin(), small.segments.end());
    return generate_synthetic_sequence(scene, {Pose::identity()}, kIntrinsics).frames[0];
  }();
  return frame;
}

ExecMode mode_of(const benchmark::State& state) {
  return state.range(0) ? ExecMode::Parallel : ExecMode::Serial;
}

void BM_DistanceTransform(benchmark::State& state) {
  const EdgeMap& edges = bench_frame().edges;
  for (auto _ : state) benchmark::DoNotOptimize(distance_transform(edges, mode_of(state)));
}

void BM_Canny(benchmark::State& state) {
  const ImageF& intensity = bench_frame().frame.intensity;
  for (auto _ : state)
    benchmark::DoNotOptimize(detect_edges_canny(intensity, CannyConfig{}, mode_of(state)));
}

void BM_StructureTensor(benchmark::State& state) {
  const ImageF& intensity = bench_frame().frame.intensity;
  for (auto _ : state)
    benchmark::DoNotOptimize(structure_tensor_response(intensity, 5, mode_of(state)));
}

void BM_Pyramid(benchmark::State& state) {
  const SyntheticFrame& sf = bench_frame();
  for (auto _ : state)
    benchmark::DoNotOptimize(build_pyramid(sf.frame, sf.edges, kIntrinsics, 4, mode_of(state)));
}

void BM_NormalEquations(benchmark::State& state) {
  const SyntheticFrame& sf = bench_frame();
  static const auto pyramid = build_pyramid(sf.frame, sf.edges, kIntrinsics, 1);
  static const Keyframe kf = sample_keyframe_points(pyramid, 0, 0.0, Pose::identity(), 4000, 50);
  for (auto _ : state)
    benchmark::DoNotOptimize(normal_equations(kf.level_points[0], Pose::identity(),
                                              pyramid[0].dist, kIntrinsics, 2.0,
                                              mode_of(state)));
}

}  // namespace

BENCHMARK(BM_DistanceTransform)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Canny)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StructureTensor)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pyramid)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormalEquations)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
