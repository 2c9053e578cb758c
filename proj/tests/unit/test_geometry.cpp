#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/LU>

#include "plg/error.hpp"
#include "plg/geometry.hpp"
#include "plg/random.hpp"

using namespace plg;

namespace {

Eigen::Matrix3d normalized(Eigen::Matrix3d m) { return m / m(2, 2); }

Point2 apply(const Eigen::Matrix3d& m, Point2 p) {
    const Eigen::Vector3d v = m * Eigen::Vector3d(p.x, p.y, 1);
    return {v.x() / v.z(), v.y() / v.z()};
}

Eigen::Matrix3d random_homography(Rng& rng) {
    Eigen::Matrix3d h;
    h << 1 + uniform_real(rng, -0.2, 0.2), uniform_real(rng, -0.2, 0.2), uniform_real(rng, -20, 20),
        uniform_real(rng, -0.2, 0.2), 1 + uniform_real(rng, -0.2, 0.2), uniform_real(rng, -20, 20),
        uniform_real(rng, -1e-4, 1e-4), uniform_real(rng, -1e-4, 1e-4), 1;
    return h;
}

std::vector<Correspondence> exact_pairs(const Eigen::Matrix3d& h, int n, Rng& rng) {
    std::vector<Correspondence> out;
    for (int i = 0; i < n; ++i) {
        Point2 p{uniform_real(rng, 0, 320), uniform_real(rng, 0, 240)};
        out.push_back({p, apply(h, p)});
    }
    return out;
}

}  // namespace

TEST(Homography, ScalingConventionAndInverse) {
    Eigen::Matrix3d m;
    m << 2, 0, 4, 0, 2, 6, 0, 0, 2;
    const Homography h(m);
    EXPECT_DOUBLE_EQ(h(2, 2), 1.0);
    EXPECT_DOUBLE_EQ(h(0, 2), 2.0);
    EXPECT_TRUE((h.matrix() * h.inverse().matrix()).isApprox(Eigen::Matrix3d::Identity(), 1e-12));
    EXPECT_THROW(Homography(Eigen::Matrix3d::Zero()), DegenerateError);
}

TEST(Warp, IdentityTranslationAndInfinity) {
    const Point2 p{3.5, -2};
    EXPECT_EQ(warp_point(Homography::identity(), p), p);
    const Point2 q = warp_point(Homography::translation(10, 5), p);
    EXPECT_DOUBLE_EQ(q.x, 13.5);
    EXPECT_DOUBLE_EQ(q.y, 3);
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(2, 0) = 1;
    m(2, 2) = 1;
    EXPECT_THROW(warp_point(Homography(m), Point2{-1, 0}), PointAtInfinityError);
}

TEST(Warp, RoundTripThroughInverse) {
    Rng rng(7);
    for (int t = 0; t < 100; ++t) {
        const Homography h(random_homography(rng));
        const Point2 p{uniform_real(rng, 0, 320), uniform_real(rng, 0, 240)};
        const Point2 r = warp_point(h.inverse(), warp_point(h, p));
        EXPECT_NEAR(r.x, p.x, 1e-9);
        EXPECT_NEAR(r.y, p.y, 1e-9);
    }
}

TEST(Dlt, UnitSquareIdentity) {
    const std::vector<Correspondence> c{{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{1, 1}, {1, 1}}, {{0, 1}, {0, 1}}};
    EXPECT_TRUE(dlt_homography(c).matrix().isApprox(Eigen::Matrix3d::Identity(), 1e-9));
}

TEST(Dlt, UnitSquareTranslated) {
    const std::vector<Correspondence> c{
        {{0, 0}, {10, 5}}, {{1, 0}, {11, 5}}, {{1, 1}, {11, 6}}, {{0, 1}, {10, 6}}};
    const Homography h = dlt_homography(c);
    EXPECT_NEAR(h(0, 2), 10, 1e-9);
    EXPECT_NEAR(h(1, 2), 5, 1e-9);
    EXPECT_NEAR(h(0, 0), 1, 1e-9);
    EXPECT_NEAR(h(2, 0), 0, 1e-9);
}

TEST(Dlt, RecoversRandomHomographies) {
    Rng rng(11);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Matrix3d truth = random_homography(rng);
        const auto pairs = exact_pairs(truth, 8, rng);
        const Homography h = dlt_homography(pairs);
        for (const auto& c : pairs) {
            const Point2 q = warp_point(h, c.src);
            EXPECT_LT(std::hypot(q.x - c.dst.x, q.y - c.dst.y), 1e-6);
        }
        EXPECT_TRUE(h.matrix().isApprox(normalized(truth), 1e-6));
    }
}

TEST(Dlt, CollinearAndShortInputsRejected) {
    const std::vector<Correspondence> c{{{0, 0}, {0, 0}}, {{1, 1}, {1, 1}}, {{2, 2}, {2, 2}}, {{0, 5}, {0, 5}}};
    EXPECT_THROW(dlt_homography(c), DegenerateError);
    const std::vector<Correspondence> all_same(6, Correspondence{{4, 4}, {1, 1}});
    EXPECT_THROW(dlt_homography(all_same), DegenerateError);
    EXPECT_THROW(dlt_homography(std::span(c).first(3)), Error);
}

TEST(Dlt, SimilarityEquivariance) {
    Rng rng(3);
    Eigen::Matrix3d s;
    const double a = 0.7, k = 1.8;
    s << k * std::cos(a), -k * std::sin(a), 14, k * std::sin(a), k * std::cos(a), -9, 0, 0, 1;
    for (int t = 0; t < 20; ++t) {
        const Eigen::Matrix3d truth = random_homography(rng);
        auto pairs = exact_pairs(truth, 10, rng);
        const Homography h = dlt_homography(pairs);
        for (auto& c : pairs) c = {apply(s, c.src), apply(s, c.dst)};
        const Homography hs = dlt_homography(pairs);
        EXPECT_TRUE(hs.matrix().isApprox(normalized(s * h.matrix() * s.inverse()), 1e-6));
    }
}

TEST(Ransac, AdaptiveIterationsMatchClosedForm) {
    for (double w : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double expect = std::ceil(std::log(0.001) / std::log(1 - w * w * w * w));
        EXPECT_EQ(adaptive_iterations(w, 0.999, 1000000), static_cast<int>(expect)) << w;
    }
    EXPECT_EQ(adaptive_iterations(0.5, 0.999, 50), 50);
    EXPECT_EQ(adaptive_iterations(1.0, 0.999, 50), 1);
    EXPECT_EQ(adaptive_iterations(0.0, 0.999, 50), 50);
}

TEST(Ransac, TooFewMatchesThrow) {
    Rng rng(1);
    const auto pairs = exact_pairs(Eigen::Matrix3d::Identity(), 3, rng);
    EXPECT_THROW(ransac_homography(std::span<const Correspondence>(pairs), RansacParams{}), Error);
}

TEST(Ransac, ExactDataAllInliers) {
    Rng rng(2);
    const Eigen::Matrix3d truth = random_homography(rng);
    const auto pairs = exact_pairs(truth, 100, rng);
    const RansacFit fit = ransac_homography(std::span<const Correspondence>(pairs), RansacParams{});
    EXPECT_EQ(fit.inliers.size(), 100u);
    EXPECT_DOUBLE_EQ(fit.inlier_ratio, 1.0);
    EXPECT_TRUE(fit.model.matrix().isApprox(normalized(truth), 1e-6));
}

TEST(Ransac, SeventyThirtyContamination) {
    Rng rng(4);
    const Eigen::Matrix3d truth = random_homography(rng);
    auto pairs = exact_pairs(truth, 70, rng);
    for (int i = 0; i < 30; ++i) {
        // Outliers displaced by at least 30 px.
        Point2 p{uniform_real(rng, 0, 320), uniform_real(rng, 0, 240)};
        Point2 q = apply(truth, p);
        const double ang = uniform_real(rng, 0, 6.283185307179586), r = uniform_real(rng, 30, 80);
        pairs.push_back({p, {q.x + r * std::cos(ang), q.y + r * std::sin(ang)}});
    }
    const RansacFit fit = ransac_homography(std::span<const Correspondence>(pairs), RansacParams{});
    std::vector<std::size_t> expect(70);
    std::iota(expect.begin(), expect.end(), 0);
    EXPECT_EQ(fit.inliers, expect);
    EXPECT_TRUE(fit.model.matrix().isApprox(normalized(truth), 1e-6));
    EXPECT_LE(fit.n_iterations, RansacParams{}.max_iters);
}

TEST(Ransac, NoConsensusOnScatteredData) {
    // Four points on a line admit no homography; nothing else can reach 4 inliers.
    std::vector<Correspondence> pairs;
    for (int i = 0; i < 6; ++i) pairs.push_back({{i * 10.0, 0}, {i * 10.0, 0}});
    RansacParams p;
    p.max_iters = 100;
    EXPECT_THROW(ransac_homography(std::span<const Correspondence>(pairs), p), NoConsensusError);
}

TEST(Ransac, MatchOrderDoesNotMatter) {
    Rng rng(8);
    const Eigen::Matrix3d truth = random_homography(rng);
    std::vector<Keypoint> ka, kb;
    std::vector<MatchPair> matches;
    for (int i = 0; i < 60; ++i) {
        Point2 p{uniform_real(rng, 0, 320), uniform_real(rng, 0, 240)};
        Point2 q = apply(truth, p);
        if (i % 4 == 0) q.x += 50;
        ka.push_back({p.x, p.y, 1, 2});
        kb.push_back({q.x, q.y, 1, 2});
        matches.push_back({i, i, 0});
    }
    RansacParams params;
    params.seed = 99;
    const auto r1 = ransac_homography(matches, ka, kb, params);
    std::reverse(matches.begin(), matches.end());
    std::swap(matches[3], matches[17]);
    const auto r2 = ransac_homography(matches, ka, kb, params);
    EXPECT_EQ(r1.inliers, r2.inliers);
    EXPECT_EQ(r1.model.matrix(), r2.model.matrix());
    EXPECT_EQ(r1.inliers.size(), 45u);
}

TEST(Ransac, SymmetricTransferErrorIsZeroOnExactPairs) {
    const Homography h = Homography::translation(3, 4);
    EXPECT_DOUBLE_EQ(symmetric_transfer_error(h, h.inverse(), {{1, 1}, {4, 5}}), 0.0);
    EXPECT_NEAR(symmetric_transfer_error(h, h.inverse(), {{1, 1}, {7, 9}}), std::sqrt(50.0), 1e-12);
}
