#include <benchmark/benchmark.h>

#include <vector>

#include "plg/geometry.hpp"
#include "plg/random.hpp"

namespace {

std::vector<plg::Correspondence> corrupted(int n, double outlier_frac, std::uint64_t seed) {
    plg::Rng rng(seed);
    Eigen::Matrix3d m;
    m << 1.02, 0.03, 12, -0.02, 0.98, -7, 1e-5, 2e-5, 1;
    const plg::Homography h(m);
    std::vector<plg::Correspondence> out;
    for (int i = 0; i < n; ++i) {
        const plg::Point2 p{plg::uniform_real(rng, 0, 640), plg::uniform_real(rng, 0, 480)};
        plg::Point2 q = plg::warp_point(h, p);
        if (plg::uniform01(rng) < outlier_frac) {
            q = {plg::uniform_real(rng, 0, 640), plg::uniform_real(rng, 0, 480)};
        } else {
            q.x += 0.5 * plg::standard_normal(rng);
            q.y += 0.5 * plg::standard_normal(rng);
        }
        out.push_back({p, q});
    }
    return out;
}

void BM_Dlt(benchmark::State& state) {
    const auto c = corrupted(static_cast<int>(state.range(0)), 0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(plg::dlt_homography(c));
}
BENCHMARK(BM_Dlt)->Arg(4)->Arg(200);

void BM_Ransac(benchmark::State& state) {
    const auto c = corrupted(200, static_cast<double>(state.range(0)) / 100.0, 2);
    plg::RansacParams p;
    for (auto _ : state) benchmark::DoNotOptimize(plg::ransac_homography(c, p));
}
BENCHMARK(BM_Ransac)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMicrosecond);

}  // namespace
