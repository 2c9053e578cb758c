#pragma once

#include <optional>
#include <span>
#include <vector>

#include "plg/features.hpp"
#include "plg/geometry.hpp"

namespace plg {

/// Settings of the geometric-consistency block: descriptor matching followed
/// by homography verification.
struct GeometryConfig {
    int max_match_dist = 64;  ///< Hamming bits
    RansacParams ransac;
    bool per_box_ransac = false;  ///< verify each box's matches with its own model
};

struct VerifiedPair {
    std::vector<MatchPair> raw;           ///< cross-checked matches
    std::vector<Correspondence> raw_corr; ///< raw matches as point pairs (same order)
    std::optional<RansacResult> ransac;   ///< empty when verification failed
    std::vector<Correspondence> inliers;  ///< verified point pairs (empty when ransac is empty)
};

/// Matches two frames and verifies the matches with a global homography.
/// A failed verification (too few matches, no consensus) is not an error:
/// `ransac` is left empty and the caller decides.
VerifiedPair verify_frame_pair(const FeatureSet& a, const FeatureSet& b, const GeometryConfig& cfg);

/// Correspondences whose source point lies inside `box`.
std::vector<Correspondence> restrict_to_box(std::span<const Correspondence> corr, const BBox& box);

/// Verified correspondences for one box: either the global inliers restricted
/// to the box, or (per_box_ransac) a RANSAC fit on the box's raw matches.
std::vector<Correspondence> box_correspondences(const VerifiedPair& pair, const BBox& box,
                                                const GeometryConfig& cfg);

}  // namespace plg
