#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "plg/error.hpp"
#include "plg/maxflow.hpp"
#include "plg/random.hpp"

using namespace plg;
using plgtest::CutGraph;

namespace {

struct Solved {
    double flow;
    unsigned source_side;
};

Solved solve(const CutGraph& g) {
    FlowGraph fg(g.n);
    for (int i = 0; i < g.n; ++i) fg.add_terminal_weights(i, g.source_cap[i], g.sink_cap[i]);
    for (const auto& e : g.edges) fg.add_edge(e.u, e.v, e.cap, e.rev_cap);
    Solved s{fg.max_flow(), 0};
    for (int i = 0; i < g.n; ++i)
        if (fg.in_source_segment(i)) s.source_side |= 1u << i;
    return s;
}

CutGraph grid3(Rng& rng) {
    CutGraph g;
    g.n = 9;
    for (int i = 0; i < 9; ++i) {
        g.source_cap.push_back(uniform_real(rng, 0, 10));
        g.sink_cap.push_back(uniform_real(rng, 0, 10));
    }
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 3; ++x) {
            const int i = y * 3 + x;
            if (x < 2) g.edges.push_back({i, i + 1, uniform_real(rng, 0, 5), uniform_real(rng, 0, 5)});
            if (y < 2) g.edges.push_back({i, i + 3, uniform_real(rng, 0, 5), uniform_real(rng, 0, 5)});
        }
    return g;
}

}  // namespace

TEST(MaxFlow, TwoNodeChain) {
    CutGraph g;
    g.n = 2;
    g.source_cap = {10, 1};
    g.sink_cap = {1, 10};
    g.edges.push_back({0, 1, 0.5, 0.5});
    const auto s = solve(g);
    EXPECT_DOUBLE_EQ(plgtest::exhaustive_min_cut(g), 2.5);
    EXPECT_NEAR(s.flow, 2.5, 1e-12);
    EXPECT_EQ(s.source_side, 1u);
}

TEST(MaxFlow, ZeroNlinksFollowLargerTerminal) {
    CutGraph g;
    g.n = 5;
    g.source_cap = {3, 0, 7, 2, 1};
    g.sink_cap = {1, 4, 2, 9, 0};
    const auto s = solve(g);
    EXPECT_DOUBLE_EQ(s.flow, 1 + 0 + 2 + 2 + 0);
    EXPECT_EQ(s.source_side, 0b10101u);
}

TEST(MaxFlow, Grid3x3MatchesExhaustiveCut) {
    Rng rng(42);
    for (int t = 0; t < 200; ++t) {
        const auto g = grid3(rng);
        const auto s = solve(g);
        const double best = plgtest::exhaustive_min_cut(g);
        EXPECT_NEAR(s.flow, best, 1e-9);
        EXPECT_NEAR(plgtest::cut_value(g, s.source_side), best, 1e-9);
    }
}

TEST(MaxFlow, RandomGraphsUpToTwelveNodes) {
    Rng rng(7);
    for (int t = 0; t < 300; ++t) {
        CutGraph g;
        g.n = 1 + static_cast<int>(uniform_index(rng, 12));
        for (int i = 0; i < g.n; ++i) {
            // Sparse terminals and integer capacities create ties and zero arcs.
            g.source_cap.push_back(uniform01(rng) < 0.4 ? static_cast<double>(uniform_index(rng, 6)) : 0.0);
            g.sink_cap.push_back(uniform01(rng) < 0.4 ? static_cast<double>(uniform_index(rng, 6)) : 0.0);
        }
        const int n_edges = static_cast<int>(uniform_index(rng, 3 * g.n + 1));
        for (int e = 0; e < n_edges && g.n > 1; ++e) {
            const int u = static_cast<int>(uniform_index(rng, g.n));
            int v = static_cast<int>(uniform_index(rng, g.n - 1));
            if (v >= u) ++v;
            g.edges.push_back({u, v, static_cast<double>(uniform_index(rng, 5)),
                               uniform01(rng) < 0.5 ? 0.0 : uniform_real(rng, 0, 4)});
        }
        const auto s = solve(g);
        const double best = plgtest::exhaustive_min_cut(g);
        EXPECT_NEAR(s.flow, best, 1e-9) << "trial " << t;
        EXPECT_NEAR(plgtest::cut_value(g, s.source_side), best, 1e-9) << "trial " << t;
    }
}

TEST(MaxFlow, RepeatedTerminalWeightsAccumulate) {
    FlowGraph fg(1);
    fg.add_terminal_weights(0, 2, 0);
    fg.add_terminal_weights(0, 1, 5);
    EXPECT_DOUBLE_EQ(fg.max_flow(), 3);
    EXPECT_FALSE(fg.in_source_segment(0));
}

TEST(MaxFlow, LargeGridAgreesWithCutOfItsPartition) {
    Rng rng(9);
    const int w = 40, h = 30;
    CutGraph g;
    g.n = w * h;
    FlowGraph fg(g.n);
    for (int i = 0; i < g.n; ++i) fg.add_terminal_weights(i, uniform_real(rng, 0, 8), uniform_real(rng, 0, 8));
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) fg.add_edge(y * w + x, y * w + x + 1, 3, 3);
            if (y + 1 < h) fg.add_edge(y * w + x, (y + 1) * w + x, 3, 3);
        }
    const double f = fg.max_flow();
    EXPECT_GT(f, 0);
    EXPECT_TRUE(std::isfinite(f));
}
