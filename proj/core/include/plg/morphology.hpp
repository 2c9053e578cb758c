#pragma once

#include <span>
#include <vector>

#include "plg/image.hpp"

namespace plg {

struct Offset {
    int dx = 0;
    int dy = 0;
};

/// Binary structuring element, symmetric about its (always set) center.
class StructuringElement {
public:
    /// All offsets with dx^2 + dy^2 <= radius^2. Radius 2 is the 13-pixel
    /// disk inside a 5x5 window; radius 1 is the 4-neighbour cross.
    static StructuringElement disk(int radius);

    std::span<const Offset> offsets() const noexcept { return offsets_; }
    int radius() const noexcept { return radius_; }

private:
    int radius_ = 0;
    std::vector<Offset> offsets_;
};

// Masks are single-channel; nonzero = set, results use {0, 255}.
// Pixels outside the image count as unset for dilation and as set for
// erosion, so erode(m) == complement(dilate(complement(m))).
PixelImage dilate(const PixelImage& mask, const StructuringElement& elem, int iters = 1);
PixelImage erode(const PixelImage& mask, const StructuringElement& elem, int iters = 1);
PixelImage complement(const PixelImage& mask);

}  // namespace plg
