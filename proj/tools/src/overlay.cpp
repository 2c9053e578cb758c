#include "overlay.hpp"

#include <algorithm>
#include <cmath>

namespace plgtool {

Rgb id_color(int id) {
    // Golden-angle hue walk, full saturation.
    const double h = std::fmod(id * 137.508, 360.0) / 60.0;
    const double x = 1 - std::fabs(std::fmod(h, 2.0) - 1);
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h)) {
        case 0: r = 1, g = x; break;
        case 1: r = x, g = 1; break;
        case 2: g = 1, b = x; break;
        case 3: g = x, b = 1; break;
        case 4: r = x, b = 1; break;
        default: r = 1, b = x; break;
    }
    return {static_cast<std::uint8_t>(255 * r), static_cast<std::uint8_t>(255 * g), static_cast<std::uint8_t>(255 * b)};
}

void draw_box(plg::PixelImage& img, const plg::BBox& box, Rgb color, int thickness) {
    const int x0 = static_cast<int>(std::lround(box.x)), y0 = static_cast<int>(std::lround(box.y));
    const int x1 = static_cast<int>(std::lround(box.right())) - 1, y1 = static_cast<int>(std::lround(box.bottom())) - 1;
    auto put = [&](int x, int y) {
        if (!img.contains(x, y)) return;
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = color[static_cast<std::size_t>(c)];
    };
    for (int t = 0; t < thickness; ++t) {
        for (int x = x0; x <= x1; ++x) {
            put(x, y0 + t);
            put(x, y1 - t);
        }
        for (int y = y0; y <= y1; ++y) {
            put(x0 + t, y);
            put(x1 - t, y);
        }
    }
}

void tint_mask(plg::PixelImage& img, const plg::PixelImage& mask, Rgb color, double opacity) {
    const int w = std::min(img.width(), mask.width()), h = std::min(img.height(), mask.height());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y)) continue;
            for (int c = 0; c < 3; ++c) {
                const double v = (1 - opacity) * img.at(x, y, c) + opacity * color[static_cast<std::size_t>(c)];
                img.at(x, y, c) = static_cast<std::uint8_t>(std::lround(v));
            }
        }
}

}  // namespace plgtool
