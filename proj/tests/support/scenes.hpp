#pragma once

#include <cstdint>

#include "plg/image.hpp"

namespace plgtest {

struct MaskScene {
    plg::PixelImage image;  ///< RGB
    plg::PixelImage gt;     ///< exact object mask
    plg::BBox bbox;         ///< tight box of the object
};

/// Filled ellipse (pixel centers inside) as a mask.
plg::PixelImage ellipse_mask(plg::ImageSize size, double cx, double cy, double rx, double ry);

/// Random ellipse object on a contrasting background. With `textured`, both
/// regions carry independent per-pixel and blotch noise; otherwise they are flat.
MaskScene object_scene(std::uint64_t seed, int width, int height, bool textured);

/// Erodes with the unit disk until at most `fraction` of the pixels remain.
plg::PixelImage shrink_to_area(const plg::PixelImage& mask, double fraction);

}  // namespace plgtest
