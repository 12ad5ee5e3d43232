#include <benchmark/benchmark.h>

#include "polyforge/apls.hpp"
#include "polyforge/metrics.hpp"
#include "polyforge/polygonize.hpp"
#include "polyforge/synth.hpp"

using namespace polyforge;

namespace {

SceneSpec bench_spec(int size) {
  SceneSpec spec;
  spec.seed = 4711;
  spec.width = spec.height = size;
  spec.road_width_min = 13;
  spec.road_width_max = 26;
  spec.branch_count = size >= 1024 ? 8 : 5;
  spec.hole_count = 2;
  return spec;
}

const Scene& scene_for(int size) {
  static Scene s512 = synth_scene(bench_spec(512));
  static Scene s1024 = synth_scene(bench_spec(1024));
  return size >= 1024 ? s1024 : s512;
}

}  // namespace

static void BM_Polygonize(benchmark::State& state) {
  const Scene& scene = scene_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto result = polygonize(scene.mask, scene.heatmap, {});
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_Polygonize)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_Evaluate(benchmark::State& state) {
  const Scene& scene = scene_for(static_cast<int>(state.range(0)));
  EvalConfig config;
  config.sf = SfParams{0.1, 20.0, 40.0, 80.0};
  const auto pred = polygonize(scene.mask, scene.heatmap, {});
  for (auto _ : state) {
    auto rec = evaluate(pred.polygons, scene.truth, config);
    benchmark::DoNotOptimize(rec);
  }
}
BENCHMARK(BM_Evaluate)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_Skeletonize(benchmark::State& state) {
  const Scene& scene = scene_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto skel = skeletonize(scene.mask);
    benchmark::DoNotOptimize(skel);
  }
}
BENCHMARK(BM_Skeletonize)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_DistanceTransform(benchmark::State& state) {
  const Scene& scene = scene_for(static_cast<int>(state.range(0)));
  const BinaryMask boundary = boundary_pixels(scene.mask);
  for (auto _ : state) {
    auto dist = squared_distance_transform(boundary);
    benchmark::DoNotOptimize(dist);
  }
}
BENCHMARK(BM_DistanceTransform)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_NmsPeaks(benchmark::State& state) {
  const Scene& scene = scene_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto peaks = nms_peaks(scene.heatmap, 0.3, 5);
    benchmark::DoNotOptimize(peaks);
  }
}
BENCHMARK(BM_NmsPeaks)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_TraceContours(benchmark::State& state) {
  const Scene& scene = scene_for(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto contours = trace_contours(scene.mask);
    benchmark::DoNotOptimize(contours);
  }
}
BENCHMARK(BM_TraceContours)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_SkeletonToGraph(benchmark::State& state) {
  const Scene& scene = scene_for(static_cast<int>(state.range(0)));
  const BinaryMask skel = skeletonize(scene.mask);
  for (auto _ : state) {
    auto graph = skeleton_to_graph(skel);
    benchmark::DoNotOptimize(graph);
  }
}
BENCHMARK(BM_SkeletonToGraph)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
