#pragma once

#include <array>
#include <cstdint>

#include "plg/image.hpp"

namespace plgtool {

using Rgb = std::array<std::uint8_t, 3>;

/// Stable distinct color for an integer id.
Rgb id_color(int id);

void draw_box(plg::PixelImage& rgb, const plg::BBox& box, Rgb color, int thickness = 2);

/// Blends `color` over the set pixels of `mask` with the given opacity.
void tint_mask(plg::PixelImage& rgb, const plg::PixelImage& mask, Rgb color, double opacity = 0.45);

}  // namespace plgtool
