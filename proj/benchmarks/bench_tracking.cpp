#include <benchmark/benchmark.h>

#include "plg/assignment.hpp"
#include "plg/metrics.hpp"
#include "plg/random.hpp"
#include "plg/synth.hpp"
#include "plg/tracking.hpp"

namespace {

void BM_Hungarian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    plg::Rng rng(4);
    Eigen::MatrixXd cost(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost(i, j) = plg::uniform01(rng);
    for (auto _ : state) benchmark::DoNotOptimize(plg::hungarian_assign(cost));
}
BENCHMARK(BM_Hungarian)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

void BM_KalmanTrackAndEval(benchmark::State& state) {
    auto sc = plg::random_scenario(8, 60, 320, 240, 1.5, 0.5, 6);
    sc.with_masks = false;
    const auto seq = plg::synth_generate(sc);
    for (auto _ : state) {
        const auto tracks = plg::track_kalman_iou(seq.gt_dets);
        benchmark::DoNotOptimize(plg::evaluate(seq.gt_tracks, tracks, {}));
    }
}
BENCHMARK(BM_KalmanTrackAndEval)->Unit(benchmark::kMillisecond);

}  // namespace
