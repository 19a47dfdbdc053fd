// Serial vs OpenMP timings for the hot kernels.

#include <benchmark/benchmark.h>

#include <vector>

#include "gap/compat.hpp"
#include "gap/eval.hpp"
#include "gap/maskforge.hpp"
#include "gap/puzzlegen.hpp"
#include "gap/shapestats.hpp"

using namespace gap;

namespace {

std::vector<raster::RasterImage> pieces(int k) {
  Rng rng(1);
  const auto img = puzzlegen::gradient_image(rng, k * 128);
  const auto inst = puzzlegen::make_puzzle(img, puzzlegen::GridSpec::for_k(k), puzzlegen::square_masks(), rng);
  std::vector<raster::RasterImage> out;
  for (const auto& p : inst.pieces) out.push_back(p.image);
  return out;
}

std::vector<eval::EvalItem> eval_items(int count) {
  Rng rng(2);
  std::vector<eval::EvalItem> items;
  for (int i = 0; i < count; ++i)
    items.push_back({std::to_string(i), 5, puzzlegen::random_permutation(25, rng), puzzlegen::random_permutation(25, rng)});
  return items;
}

void BM_CompatSerial(benchmark::State& state) {
  const auto p = pieces(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compat::compatibility_table_serial(p));
}

void BM_CompatParallel(benchmark::State& state) {
  const auto p = pieces(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compat::compatibility_table(p));
}

void BM_MasksSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(maskforge::sample_masks_serial(3, static_cast<int>(state.range(0)), 128, {}));
}

void BM_MasksParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(maskforge::sample_masks(3, static_cast<int>(state.range(0)), 128, {}));
}

void BM_FeaturesSerial(benchmark::State& state) {
  const auto masks = maskforge::sample_masks(4, static_cast<int>(state.range(0)), 128, {});
  for (auto _ : state) benchmark::DoNotOptimize(shapestats::extract_features_batch_serial(masks));
}

void BM_FeaturesParallel(benchmark::State& state) {
  const auto masks = maskforge::sample_masks(4, static_cast<int>(state.range(0)), 128, {});
  for (auto _ : state) benchmark::DoNotOptimize(shapestats::extract_features_batch(masks));
}

void BM_EvalSerial(benchmark::State& state) {
  const auto items = eval_items(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eval::evaluate_serial(items));
}

void BM_EvalParallel(benchmark::State& state) {
  const auto items = eval_items(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eval::evaluate(items));
}

}  // namespace

BENCHMARK(BM_CompatSerial)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompatParallel)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MasksSerial)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MasksParallel)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeaturesSerial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeaturesParallel)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvalParallel)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
