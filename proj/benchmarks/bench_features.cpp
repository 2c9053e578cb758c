#include <benchmark/benchmark.h>

#include "plg/features.hpp"
#include "plg/synth.hpp"

namespace {

plg::PixelImage frame(int w, int h) {
    auto sc = plg::random_scenario(6, 1, w, h, 0, 0, 3);
    sc.with_masks = false;
    return plg::synth_generate(sc).frames.front();
}

void BM_DetectKeypoints(benchmark::State& state) {
    const auto img = frame(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(plg::detect_keypoints(img, 2000));
}
BENCHMARK(BM_DetectKeypoints)->Args({320, 240})->Args({1280, 720})->Unit(benchmark::kMillisecond);

void BM_Describe(benchmark::State& state) {
    const auto img = frame(1280, 720);
    const auto kps = plg::detect_keypoints(img, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(plg::describe(img, kps));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kps.size()));
}
BENCHMARK(BM_Describe)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Match(benchmark::State& state) {
    const plg::HarrisBriefBackend backend(static_cast<int>(state.range(0)));
    auto sc = plg::random_scenario(6, 2, 640, 480, 3, 1, 5);
    sc.with_masks = false;
    const auto seq = plg::synth_generate(sc);
    const auto a = backend.extract(seq.frames[0]);
    const auto b = backend.extract(seq.frames[1]);
    for (auto _ : state) benchmark::DoNotOptimize(plg::brute_force_match(a.descriptors, b.descriptors, 64));
}
BENCHMARK(BM_Match)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
