#include <benchmark/benchmark.h>

#include "plg/maxflow.hpp"
#include "plg/morphology.hpp"
#include "plg/random.hpp"
#include "plg/refine.hpp"
#include "plg/superpixel.hpp"
#include "plg/synth.hpp"

namespace {

// 4-connected grid with random capacities.
void BM_MaxFlowGrid(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    for (auto _ : state) {
        state.PauseTiming();
        plg::Rng rng(9);
        plg::FlowGraph g(side * side);
        for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) {
                const int v = y * side + x;
                g.add_terminal_weights(v, plg::uniform_real(rng, 0, 4), plg::uniform_real(rng, 0, 4));
                if (x + 1 < side) g.add_edge(v, v + 1, 1.5, 1.5);
                if (y + 1 < side) g.add_edge(v, v + side, 1.5, 1.5);
            }
        state.ResumeTiming();
        benchmark::DoNotOptimize(g.max_flow());
    }
}
BENCHMARK(BM_MaxFlowGrid)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

struct Scene {
    plg::SynthSequence seq;
    Scene() {
        auto sc = plg::random_scenario(4, 1, 640, 480, 0, 0, 21);
        seq = plg::synth_generate(sc);
    }
};

const Scene& scene() {
    static const Scene s;
    return s;
}

void BM_Slic(benchmark::State& state) {
    plg::SlicParams p;
    p.k = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(plg::slic(scene().seq.frames[0], p));
}
BENCHMARK(BM_Slic)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_RefineGrabCut(benchmark::State& state) {
    const auto& s = scene().seq;
    const auto init = plg::erode(s.gt_masks[0][0], plg::StructuringElement::disk(1), 4);
    plg::GrabCutParams p;
    for (auto _ : state) benchmark::DoNotOptimize(plg::refine_grabcut(s.frames[0], init, s.gt_dets[0][0].bbox, p));
}
BENCHMARK(BM_RefineGrabCut)->Unit(benchmark::kMillisecond);

void BM_RefineDilation(benchmark::State& state) {
    const auto& s = scene().seq;
    const auto init = plg::erode(s.gt_masks[0][0], plg::StructuringElement::disk(1), 4);
    for (auto _ : state) benchmark::DoNotOptimize(plg::refine_dilation(init, s.gt_dets[0][0].bbox));
}
BENCHMARK(BM_RefineDilation)->Unit(benchmark::kMicrosecond);

}  // namespace
