// Microbenchmarks for the hot kernels: correlation volume, weighted max
// pooling, clustering, loss evaluation and ground-truth generation.

#include <benchmark/benchmark.h>

#include <random>

#include "rigidflow/correlation.hpp"
#include "rigidflow/losses.hpp"
#include "rigidflow/scene.hpp"
#include "rigidflow/segmentation.hpp"

using namespace rigidflow;

namespace {

Imaged random_map(int H, int W, int C, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Imaged img(H, W, C);
  for (double& x : img.data()) x = u(rng);
  return img;
}

const ScenePair& bench_scene() {
  static const ScenePair scene = generate_scene_pair(GeneratorConfig{}, 1);
  return scene;
}

const PixelMaps& bench_maps() {
  static const PixelMaps maps = compute_gt_maps(bench_scene());
  return maps;
}

}  // namespace

static void BM_Correlate(benchmark::State& state) {
  const int L = int(state.range(0));
  const Imaged f_t = random_map(30, 40, 8, 1);
  const Imaged f_tm1 = random_map(30, 40, 8, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(correlate(f_t, f_tm1, L));
  }
}
BENCHMARK(BM_Correlate)->Arg(2)->Arg(4)->Arg(8);

static void BM_WeightedMaxpool(benchmark::State& state) {
  const Imaged f_t = random_map(30, 40, 8, 1);
  const Imaged f_tm1 = random_map(30, 40, 8, 2);
  const CorrelationVolume vol = correlate(f_t, f_tm1, 4);
  const Imaged pf = random_map(30, 40, 16, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(weighted_maxpool(vol, pf));
  }
}
BENCHMARK(BM_WeightedMaxpool);

static void BM_GenerateScene(benchmark::State& state) {
  const GeneratorConfig cfg;
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_scene_pair(cfg, seed++));
  }
}
BENCHMARK(BM_GenerateScene);

static void BM_ComputeGtMaps(benchmark::State& state) {
  const ScenePair& scene = bench_scene();
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_gt_maps(scene));
  }
}
BENCHMARK(BM_ComputeGtMaps);

static void BM_GreedyCluster(benchmark::State& state) {
  const PixelMaps& maps = bench_maps();
  const Imaged xi = trajectory_map(maps.X, maps.T);
  for (auto _ : state) {
    benchmark::DoNotOptimize(greedy_cluster(xi, maps.B, maps.eta, maps.mask));
  }
}
BENCHMARK(BM_GreedyCluster);

static void BM_TotalLoss(benchmark::State& state) {
  const PixelMaps& maps = bench_maps();
  const PredictionMaps pred = PredictionMaps::oracle(maps);
  const LossWeights w;
  for (auto _ : state) {
    benchmark::DoNotOptimize(total_loss(pred, maps, w));
  }
}
BENCHMARK(BM_TotalLoss);

BENCHMARK_MAIN();
