#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "plg/features.hpp"

namespace plg {

struct Point2 {
    double x = 0;
    double y = 0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

struct Correspondence {
    Point2 src;
    Point2 dst;
};

/// 3x3 projective map, scaled so h(2,2) = 1, or to unit Frobenius norm when
/// h(2,2) is numerically zero. Construction rejects singular matrices.
class Homography {
public:
    Homography() : h_(Eigen::Matrix3d::Identity()) {}
    explicit Homography(const Eigen::Matrix3d& m);

    static Homography identity() { return {}; }
    static Homography translation(double tx, double ty);

    const Eigen::Matrix3d& matrix() const noexcept { return h_; }
    double operator()(int r, int c) const noexcept { return h_(r, c); }
    Homography inverse() const;

private:
    Eigen::Matrix3d h_;
};

/// Projective mapping with perspective divide; PointAtInfinityError when the
/// homogeneous coordinate vanishes.
Point2 warp_point(const Homography& h, Point2 p);

/// Normalized DLT (Hartley conditioning, smallest right singular vector) on
/// four or more correspondences. DegenerateError when the configuration does
/// not determine a unique homography (e.g. collinear minimal samples).
Homography dlt_homography(std::span<const Correspondence> pairs);

/// sqrt(|dst - H src|^2 + |src - H^-1 dst|^2); +inf if a point maps to infinity.
double symmetric_transfer_error(const Homography& h, const Homography& h_inv, const Correspondence& c);

struct RansacParams {
    double threshold_px = 3.0;
    int max_iters = 2000;
    double confidence = 0.999;
    std::uint64_t seed = 0;
};

struct RansacResult {
    Homography model;
    std::vector<MatchPair> inliers;  ///< canonical order (idx_a, idx_b)
    int n_iterations = 0;
    double inlier_ratio = 0;
};

/// Index-level result for raw correspondences.
struct RansacFit {
    Homography model;
    std::vector<std::size_t> inliers;  ///< ascending indices into the input
    int n_iterations = 0;
    double inlier_ratio = 0;
};

/// Iterations needed to draw one all-inlier minimal sample with the given
/// confidence when a fraction `inlier_ratio` of the data are inliers.
int adaptive_iterations(double inlier_ratio, double confidence, int max_iters);

/// RANSAC over raw correspondences. Throws Error for fewer than 4 inputs and
/// NoConsensusError when no model gathers 4 inliers. The winner is re-fitted
/// on its inliers.
RansacFit ransac_homography(std::span<const Correspondence> corr, const RansacParams& params);

/// RANSAC over descriptor matches. Matches are sorted canonically before
/// sampling, so the result does not depend on input order.
RansacResult ransac_homography(std::span<const MatchPair> matches, std::span<const Keypoint> kps_a,
                               std::span<const Keypoint> kps_b, const RansacParams& params);

}  // namespace plg
