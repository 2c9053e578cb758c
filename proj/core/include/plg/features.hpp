#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "plg/image.hpp"

namespace plg {

struct Keypoint {
    double x = 0;         ///< subpixel column
    double y = 0;         ///< subpixel row
    double response = 0;  ///< corner strength, >= 0
    double scale = 0;     ///< integration window radius in pixels
};

inline constexpr int kDescriptorBits = 256;
inline constexpr int kPatchRadius = 16;

/// 256-bit binary intensity-comparison descriptor.
struct Descriptor {
    std::array<std::uint64_t, kDescriptorBits / 64> words{};

    bool bit(int i) const noexcept { return (words[i >> 6] >> (i & 63)) & 1u; }
    void set(int i) noexcept { words[i >> 6] |= std::uint64_t{1} << (i & 63); }
    friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

inline int hamming(const Descriptor& a, const Descriptor& b) noexcept {
    int d = 0;
    for (std::size_t i = 0; i < a.words.size(); ++i) d += std::popcount(a.words[i] ^ b.words[i]);
    return d;
}

struct MatchPair {
    int idx_a = 0;
    int idx_b = 0;
    double distance = 0;
    friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct DetectorParams {
    double harris_k = 0.04;
    double min_response = 100.0;  ///< absolute threshold; intensities are 0..255
    int nms_radius = 2;
};

/// Harris corners: Sobel gradients, 5-tap binomial integration window,
/// square non-maximum suppression and parabolic subpixel refinement.
/// Returns at most `max_n` keypoints sorted by response (descending, ties by
/// row then column). RGB input is converted to gray first.
std::vector<Keypoint> detect_keypoints(const PixelImage& img, int max_n,
                                       const DetectorParams& params = {});

/// The fixed comparison pattern: pairs of (dx, dy) offsets within the patch.
struct SamplePair {
    std::int8_t x1, y1, x2, y2;
};
std::span<const SamplePair> sampling_pattern();

struct DescribeResult {
    std::vector<Keypoint> keypoints;  ///< survivors, same order as input
    std::vector<Descriptor> descriptors;
    std::size_t dropped = 0;          ///< keypoints too close to the border
};

/// Binary descriptors from 5x5 box-sum comparisons on the fixed pattern.
/// Keypoints closer than kPatchRadius to the border are dropped.
DescribeResult describe(const PixelImage& img, std::span<const Keypoint> kps);

/// Mutual nearest neighbours in Hamming distance with distance <= max_dist.
/// Ties resolve to the lowest index. Output sorted by idx_a.
std::vector<MatchPair> brute_force_match(std::span<const Descriptor> desc_a,
                                         std::span<const Descriptor> desc_b, int max_dist);

struct FeatureSet {
    ImageSize size;
    std::vector<Keypoint> keypoints;
    std::vector<Descriptor> descriptors;  ///< descriptors[i] belongs to keypoints[i]
};

/// Pluggable feature stage. Implementations must be deterministic.
class FeatureBackend {
public:
    virtual ~FeatureBackend() = default;
    virtual FeatureSet extract(const PixelImage& img) const = 0;
};

class HarrisBriefBackend final : public FeatureBackend {
public:
    explicit HarrisBriefBackend(int max_keypoints = 1000, DetectorParams params = {})
        : max_keypoints_(max_keypoints), params_(params) {}
    FeatureSet extract(const PixelImage& img) const override;

private:
    int max_keypoints_;
    DetectorParams params_;
};

// Debug dumps: "frame,x,y,response" and "ia,ib,dist".
void write_keypoints_csv(const std::filesystem::path& path, int frame, std::span<const Keypoint> kps);
void write_matches_csv(const std::filesystem::path& path, std::span<const MatchPair> matches);

}  // namespace plg
