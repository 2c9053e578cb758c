#include "plg/consistency.hpp"

#include "plg/error.hpp"
#include "plg/log.hpp"

namespace plg {

VerifiedPair verify_frame_pair(const FeatureSet& a, const FeatureSet& b, const GeometryConfig& cfg) {
    VerifiedPair out;
    out.raw = brute_force_match(a.descriptors, b.descriptors, cfg.max_match_dist);
    out.raw_corr.reserve(out.raw.size());
    for (const auto& m : out.raw) {
        const auto& ka = a.keypoints[static_cast<std::size_t>(m.idx_a)];
        const auto& kb = b.keypoints[static_cast<std::size_t>(m.idx_b)];
        out.raw_corr.push_back({{ka.x, ka.y}, {kb.x, kb.y}});
    }
    if (out.raw.size() < 4) return out;
    try {
        RansacResult r = ransac_homography(out.raw, a.keypoints, b.keypoints, cfg.ransac);
        out.inliers.reserve(r.inliers.size());
        for (const auto& m : r.inliers) {
            const auto& ka = a.keypoints[static_cast<std::size_t>(m.idx_a)];
            const auto& kb = b.keypoints[static_cast<std::size_t>(m.idx_b)];
            out.inliers.push_back({{ka.x, ka.y}, {kb.x, kb.y}});
        }
        out.ransac = std::move(r);
    } catch (const NoConsensusError&) {
    }
    return out;
}

std::vector<Correspondence> restrict_to_box(std::span<const Correspondence> corr, const BBox& box) {
    std::vector<Correspondence> out;
    for (const auto& c : corr)
        if (box.contains(c.src.x, c.src.y)) out.push_back(c);
    return out;
}

std::vector<Correspondence> box_correspondences(const VerifiedPair& pair, const BBox& box,
                                                const GeometryConfig& cfg) {
    if (!cfg.per_box_ransac) return restrict_to_box(pair.inliers, box);
    std::vector<Correspondence> local = restrict_to_box(pair.raw_corr, box);
    if (local.size() < 4) return {};
    try {
        RansacFit fit = ransac_homography(local, cfg.ransac);
        std::vector<Correspondence> out;
        out.reserve(fit.inliers.size());
        for (auto i : fit.inliers) out.push_back(local[i]);
        return out;
    } catch (const NoConsensusError&) {
        return {};
    }
}

}  // namespace plg
