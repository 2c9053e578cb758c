#include "plg/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "plg/error.hpp"
#include "plg/random.hpp"

namespace plg {

namespace {

constexpr double kMinDeterminant = 1e-12;

Eigen::Matrix3d normalize_scale(const Eigen::Matrix3d& m) {
    if (std::abs(m(2, 2)) > 1e-12 * m.norm()) return m / m(2, 2);
    return m / m.norm();
}

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Eigen::Matrix3d conditioning(std::span<const Correspondence> pairs, bool use_dst) {
    double mx = 0, my = 0;
    for (const auto& c : pairs) {
        const Point2& p = use_dst ? c.dst : c.src;
        mx += p.x;
        my += p.y;
    }
    const double n = static_cast<double>(pairs.size());
    mx /= n;
    my /= n;
    double mean_dist = 0;
    for (const auto& c : pairs) {
        const Point2& p = use_dst ? c.dst : c.src;
        mean_dist += std::hypot(p.x - mx, p.y - my);
    }
    mean_dist /= n;
    if (!(mean_dist > 0)) throw DegenerateError();
    const double s = std::sqrt(2.0) / mean_dist;
    Eigen::Matrix3d t;
    t << s, 0, -s * mx, 0, s, -s * my, 0, 0, 1;
    return t;
}

bool collinear(const Point2& a, const Point2& b, const Point2& c, double scale2) {
    const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return std::abs(cross) <= 1e-9 * scale2;
}

bool minimal_sample_degenerate(std::span<const Correspondence> s) {
    auto check = [&](bool dst) {
        double scale2 = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                const Point2& a = dst ? s[i].dst : s[i].src;
                const Point2& b = dst ? s[j].dst : s[j].src;
                scale2 = std::max(scale2, (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
            }
        if (scale2 <= 0) return true;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j)
                for (std::size_t k = j + 1; k < s.size(); ++k) {
                    const Point2& a = dst ? s[i].dst : s[i].src;
                    const Point2& b = dst ? s[j].dst : s[j].src;
                    const Point2& c = dst ? s[k].dst : s[k].src;
                    if (collinear(a, b, c, scale2)) return true;
                }
        return false;
    };
    return check(false) || check(true);
}

}  // namespace

Homography::Homography(const Eigen::Matrix3d& m) : h_(normalize_scale(m)) {
    if (!h_.allFinite() || std::abs(h_.determinant()) <= kMinDeterminant)
        throw DegenerateError("singular homography");
}

Homography Homography::translation(double tx, double ty) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 2) = tx;
    m(1, 2) = ty;
    return Homography(m);
}

Homography Homography::inverse() const { return Homography(h_.inverse()); }

Point2 warp_point(const Homography& h, Point2 p) {
    const auto& m = h.matrix();
    const double w = m(2, 0) * p.x + m(2, 1) * p.y + m(2, 2);
    const double scale = std::abs(m(2, 0) * p.x) + std::abs(m(2, 1) * p.y) + std::abs(m(2, 2));
    if (!std::isfinite(w) || std::abs(w) <= 1e-12 * std::max(scale, 1.0)) throw PointAtInfinityError();
    return {(m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2)) / w, (m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2)) / w};
}

Homography dlt_homography(std::span<const Correspondence> pairs) {
    if (pairs.size() < 4) throw Error("dlt_homography needs at least 4 correspondences");
    if (pairs.size() == 4 && minimal_sample_degenerate(pairs)) throw DegenerateError();

    const Eigen::Matrix3d ts = conditioning(pairs, false);
    const Eigen::Matrix3d td = conditioning(pairs, true);
    const std::size_t n = pairs.size();
    Eigen::Matrix<double, Eigen::Dynamic, 9> a(2 * n, 9);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d s = ts * Eigen::Vector3d(pairs[i].src.x, pairs[i].src.y, 1.0);
        const Eigen::Vector3d d = td * Eigen::Vector3d(pairs[i].dst.x, pairs[i].dst.y, 1.0);
        const double x = s.x(), y = s.y(), u = d.x(), v = d.y();
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, Eigen::Dynamic, 9>> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // A one-dimensional null space is required; a second tiny singular value
    // means the points do not pin the homography down.
    if (sv.size() >= 8 && sv(7) <= 1e-10 * sv(0)) throw DegenerateError();
    const Eigen::Matrix<double, 9, 1> hv = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << hv(0), hv(1), hv(2), hv(3), hv(4), hv(5), hv(6), hv(7), hv(8);
    const Eigen::Matrix3d h = td.inverse() * hn * ts;
    try {
        return Homography(h);
    } catch (const DegenerateError&) {
        throw DegenerateError();
    }
}

double symmetric_transfer_error(const Homography& h, const Homography& h_inv, const Correspondence& c) {
    try {
        const Point2 f = warp_point(h, c.src);
        const Point2 b = warp_point(h_inv, c.dst);
        const double df = (f.x - c.dst.x) * (f.x - c.dst.x) + (f.y - c.dst.y) * (f.y - c.dst.y);
        const double db = (b.x - c.src.x) * (b.x - c.src.x) + (b.y - c.src.y) * (b.y - c.src.y);
        return std::sqrt(df + db);
    } catch (const PointAtInfinityError&) {
        return std::numeric_limits<double>::infinity();
    }
}

int adaptive_iterations(double inlier_ratio, double confidence, int max_iters) {
    if (inlier_ratio <= 0) return max_iters;
    if (inlier_ratio >= 1) return 1;
    const double p_good = std::pow(inlier_ratio, 4);
    const double denom = std::log1p(-p_good);
    if (denom >= 0) return max_iters;
    const double n = std::ceil(std::log(1.0 - confidence) / denom);
    if (!(n < max_iters)) return max_iters;
    return std::max(1, static_cast<int>(n));
}

namespace {

struct Consensus {
    std::vector<std::size_t> inliers;
    double error_sum = 0;
};

Consensus score(const Homography& h, std::span<const Correspondence> corr, double threshold) {
    Consensus c;
    Homography h_inv;
    try {
        h_inv = h.inverse();
    } catch (const DegenerateError&) {
        return c;
    }
    for (std::size_t i = 0; i < corr.size(); ++i) {
        const double e = symmetric_transfer_error(h, h_inv, corr[i]);
        if (e <= threshold) {
            c.inliers.push_back(i);
            c.error_sum += e;
        }
    }
    return c;
}

bool better(const Consensus& a, const Consensus& b) {
    if (a.inliers.size() != b.inliers.size()) return a.inliers.size() > b.inliers.size();
    return a.error_sum < b.error_sum;
}

}  // namespace

RansacFit ransac_homography(std::span<const Correspondence> corr, const RansacParams& params) {
    const std::size_t n = corr.size();
    if (n < 4) throw Error("ransac_homography needs at least 4 matches, got " + std::to_string(n));

    Rng rng(params.seed);
    Consensus best;
    std::optional<Homography> best_model;
    int needed = std::max(params.max_iters, 1);
    int iter = 0;
    std::array<Correspondence, 4> sample;
    for (; iter < needed; ++iter) {
        std::array<std::size_t, 4> idx{};
        for (int k = 0; k < 4; ++k) {
            bool fresh = false;
            while (!fresh) {
                idx[k] = static_cast<std::size_t>(uniform_index(rng, n));
                fresh = std::find(idx.begin(), idx.begin() + k, idx[k]) == idx.begin() + k;
            }
            sample[k] = corr[idx[k]];
        }
        Homography h;
        try {
            h = dlt_homography(sample);
        } catch (const DegenerateError&) {
            continue;
        }
        Consensus c = score(h, corr, params.threshold_px);
        if (best_model && !better(c, best)) continue;
        best = std::move(c);
        best_model = h;
        const double w = static_cast<double>(best.inliers.size()) / static_cast<double>(n);
        needed = std::min(needed, adaptive_iterations(w, params.confidence, params.max_iters));
    }
    if (!best_model || best.inliers.size() < 4) throw NoConsensusError();

    // Re-fit on the consensus set and re-score; keep the refit unless it loses support.
    std::vector<Correspondence> in;
    in.reserve(best.inliers.size());
    for (auto i : best.inliers) in.push_back(corr[i]);
    try {
        Homography refined = dlt_homography(in);
        Consensus c = score(refined, corr, params.threshold_px);
        if (c.inliers.size() >= best.inliers.size()) {
            best = std::move(c);
            best_model = refined;
        }
    } catch (const DegenerateError&) {
    }

    RansacFit fit;
    fit.model = *best_model;
    fit.inliers = std::move(best.inliers);
    fit.n_iterations = std::min(iter, needed);
    fit.inlier_ratio = static_cast<double>(fit.inliers.size()) / static_cast<double>(n);
    return fit;
}

RansacResult ransac_homography(std::span<const MatchPair> matches, std::span<const Keypoint> kps_a,
                               std::span<const Keypoint> kps_b, const RansacParams& params) {
    std::vector<MatchPair> sorted(matches.begin(), matches.end());
    std::sort(sorted.begin(), sorted.end(), [](const MatchPair& a, const MatchPair& b) {
        return a.idx_a != b.idx_a ? a.idx_a < b.idx_a : a.idx_b < b.idx_b;
    });
    std::vector<Correspondence> corr;
    corr.reserve(sorted.size());
    for (const auto& m : sorted) {
        const auto& ka = kps_a[static_cast<std::size_t>(m.idx_a)];
        const auto& kb = kps_b[static_cast<std::size_t>(m.idx_b)];
        corr.push_back({{ka.x, ka.y}, {kb.x, kb.y}});
    }
    RansacFit fit = ransac_homography(corr, params);
    RansacResult res;
    res.model = fit.model;
    res.n_iterations = fit.n_iterations;
    res.inlier_ratio = fit.inlier_ratio;
    res.inliers.reserve(fit.inliers.size());
    for (auto i : fit.inliers) res.inliers.push_back(sorted[i]);
    return res;
}

}  // namespace plg
