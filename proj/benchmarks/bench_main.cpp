#include <random>

#include <benchmark/benchmark.h>

#include "oracles.hpp"
#include "unistitch/unistitch.hpp"

using namespace unistitch;

namespace {

BinaryMask blob_mask(int side) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(side));
  return oracle::random_mask(rng, side, side);
}

void BM_Dilate(benchmark::State& state) {
  const BinaryMask m = blob_mask(512);
  const Kernel k(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dilate(m, k));
}
BENCHMARK(BM_Dilate)->Arg(3)->Arg(11)->Arg(61);

void BM_DistanceTransform(benchmark::State& state) {
  const BinaryMask m = blob_mask(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(distance_transform(m, Kernel(3)));
}
BENCHMARK(BM_DistanceTransform)->Arg(128)->Arg(512);

void BM_Telea(benchmark::State& state) {
  const ImageBuffer img = oracle::scene(256, 256, 1);
  BinaryMask hole(256, 256);
  for (int y = 96; y < 160; ++y) {
    for (int x = 96; x < 96 + state.range(0); ++x) hole.set(x, y, true);
  }
  for (auto _ : state) benchmark::DoNotOptimize(telea_inpaint(img, hole, 20));
}
BENCHMARK(BM_Telea)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_Wmgrp(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const ImageBuffer world = oracle::scene(w * 2, w * 3 / 4, 2);
  const ImageBuffer left = oracle::window(world, 0, 0, w, w * 3 / 4);
  const ImageBuffer right = oracle::window(world, w * 3 / 4, 0, w, w * 3 / 4);
  const Homography h = Homography::translation(w * 3 / 4, 0);
  ReferenceBackend backend;
  for (auto _ : state) benchmark::DoNotOptimize(stitch(left, right, h, StitchConfig{}, backend));
}
BENCHMARK(BM_Wmgrp)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
