#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "plg/image.hpp"

namespace plg {

/// Per-pixel segment labels, contiguous in [0, n_labels).
struct SuperpixelMap {
    int width = 0;
    int height = 0;
    std::vector<int> labels;
    int n_labels = 0;
    int requested_k = 0;
    double compactness = 0;

    int label(int x, int y) const noexcept { return labels[static_cast<std::size_t>(y) * width + x]; }
};

struct SlicParams {
    int k = 2000;
    double compactness = 0.1;
    int max_iter = 10;
    bool enforce_connectivity = true;
    /// Connected pieces smaller than this fraction of N/K are merged away.
    double min_size_factor = 0.5;
};

/// sRGB (D65) to CIELAB.
std::array<double, 3> srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// SLIC superpixels: k-means in (L, a, b, x, y) with
/// D = sqrt(d_lab^2 + m^2 (d_xy / S)^2), S = sqrt(N / K), each center only
/// searching a 2S x 2S window. Seeds sit on a regular grid and are moved to
/// the lowest-gradient pixel of their 3x3 neighbourhood. With connectivity
/// enforcement every label is 4-connected. Throws if K is outside [1, N].
SuperpixelMap slic(const PixelImage& image, const SlicParams& params);

/// Pixel count per label.
std::vector<std::size_t> segment_sizes(const SuperpixelMap& map);

}  // namespace plg
