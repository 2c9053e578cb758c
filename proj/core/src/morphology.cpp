#include "plg/morphology.hpp"

#include "plg/error.hpp"

namespace plg {

StructuringElement StructuringElement::disk(int radius) {
    if (radius < 0) throw Error("structuring element radius must be >= 0");
    StructuringElement e;
    e.radius_ = radius;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius) e.offsets_.push_back({dx, dy});
    return e;
}

namespace {

void require_mask(const PixelImage& m) {
    if (m.channels() != 1) throw Error("morphology expects a single-channel mask");
}

PixelImage dilate_once(const PixelImage& src, const StructuringElement& elem) {
    const int w = src.width(), h = src.height();
    PixelImage out(w, h, 1, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!src.at(x, y)) continue;
            for (const auto& o : elem.offsets()) {
                const int xx = x + o.dx, yy = y + o.dy;
                if (xx >= 0 && yy >= 0 && xx < w && yy < h) out.at(xx, yy) = 255;
            }
        }
    return out;
}

PixelImage erode_once(const PixelImage& src, const StructuringElement& elem) {
    const int w = src.width(), h = src.height();
    PixelImage out(w, h, 1, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!src.at(x, y)) continue;
            bool keep = true;
            for (const auto& o : elem.offsets()) {
                const int xx = x + o.dx, yy = y + o.dy;
                if (xx >= 0 && yy >= 0 && xx < w && yy < h && !src.at(xx, yy)) {
                    keep = false;
                    break;
                }
            }
            if (keep) out.at(x, y) = 255;
        }
    return out;
}

}  // namespace

PixelImage dilate(const PixelImage& mask, const StructuringElement& elem, int iters) {
    require_mask(mask);
    PixelImage cur = mask;
    for (auto& v : cur.data()) v = v ? 255 : 0;
    for (int i = 0; i < iters; ++i) cur = dilate_once(cur, elem);
    return cur;
}

PixelImage erode(const PixelImage& mask, const StructuringElement& elem, int iters) {
    require_mask(mask);
    PixelImage cur = mask;
    for (auto& v : cur.data()) v = v ? 255 : 0;
    for (int i = 0; i < iters; ++i) cur = erode_once(cur, elem);
    return cur;
}

PixelImage complement(const PixelImage& mask) {
    require_mask(mask);
    PixelImage out = mask;
    for (auto& v : out.data()) v = v ? 0 : 255;
    return out;
}

}  // namespace plg
