#include "plg/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plg/error.hpp"

namespace plg {

namespace {

void check_dims(int width, int height, int channels) {
    if (width < 1 || height < 1)
        throw Error("image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
    if (channels != 1 && channels != 3)
        throw Error("unsupported channel count " + std::to_string(channels));
}

}  // namespace

PixelImage::PixelImage(int width, int height, int channels, std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
    check_dims(width, height, channels);
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

PixelImage::PixelImage(int width, int height, int channels, std::vector<std::uint8_t> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
    check_dims(width, height, channels);
    if (data_.size() != static_cast<std::size_t>(width) * height * channels)
        throw Error("pixel buffer has " + std::to_string(data_.size()) + " bytes, expected " +
                    std::to_string(static_cast<std::size_t>(width) * height * channels));
}

double intersection_area(const BBox& a, const BBox& b) noexcept {
    const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
    const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
    return (iw > 0 && ih > 0) ? iw * ih : 0.0;
}

double iou(const BBox& a, const BBox& b) noexcept {
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    return uni > 0 ? inter / uni : 0.0;
}

PixelRect pixel_rect(const BBox& box, ImageSize size) noexcept {
    PixelRect r;
    r.x0 = std::clamp(static_cast<int>(std::ceil(box.x - 0.5)), 0, size.width);
    r.y0 = std::clamp(static_cast<int>(std::ceil(box.y - 0.5)), 0, size.height);
    r.x1 = std::clamp(static_cast<int>(std::ceil(box.right() - 0.5)), 0, size.width);
    r.y1 = std::clamp(static_cast<int>(std::ceil(box.bottom() - 0.5)), 0, size.height);
    return r;
}

ClampResult clamp_box(const BBox& box, ImageSize size, bool shift) noexcept {
    ClampResult out;
    const BBox frame{0, 0, static_cast<double>(size.width), static_cast<double>(size.height)};
    out.valid = box.w > 0 && box.h > 0 && intersection_area(box, frame) > 0;
    if (!out.valid) {
        out.box = box;
        return out;
    }
    auto clamp_axis = [&](double pos, double len, double limit, double& new_pos, double& new_len) {
        if (shift && len <= limit) {
            new_pos = std::clamp(pos, 0.0, limit - len);
            new_len = len;
            return;
        }
        const double lo = std::max(pos, 0.0);
        const double hi = std::min(pos + len, limit);
        new_pos = lo;
        new_len = hi - lo;
        if (new_len != len) out.truncated = true;
    };
    clamp_axis(box.x, box.w, frame.w, out.box.x, out.box.w);
    clamp_axis(box.y, box.h, frame.h, out.box.y, out.box.h);
    return out;
}

PixelImage to_gray(const PixelImage& img) {
    if (img.channels() == 1) return img;
    PixelImage out(img.width(), img.height(), 1);
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0, n = img.pixel_count(); i < n; ++i) {
        const unsigned r = src[3 * i], g = src[3 * i + 1], b = src[3 * i + 2];
        dst[i] = static_cast<std::uint8_t>((77 * r + 150 * g + 29 * b + 128) >> 8);
    }
    return out;
}

PixelImage to_rgb(const PixelImage& img) {
    if (img.channels() == 3) return img;
    PixelImage out(img.width(), img.height(), 3);
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t i = 0, n = img.pixel_count(); i < n; ++i)
        dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = src[i];
    return out;
}

PixelImage make_mask(ImageSize size) { return PixelImage(size.width, size.height, 1, 0); }

std::size_t count_set(const PixelImage& mask) noexcept {
    return static_cast<std::size_t>(
        std::count_if(mask.data().begin(), mask.data().end(), [](std::uint8_t v) { return v != 0; }));
}

double mask_iou(const PixelImage& a, const PixelImage& b) {
    if (a.size() != b.size() || a.channels() != 1 || b.channels() != 1)
        throw Error("mask_iou: masks must be single-channel and equally sized");
    std::size_t inter = 0, uni = 0;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const bool sa = da[i] != 0, sb = db[i] != 0;
        inter += (sa && sb);
        uni += (sa || sb);
    }
    return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
}

PixelRect mask_bounds(const PixelImage& mask) noexcept {
    PixelRect r{mask.width(), mask.height(), 0, 0};
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) {
                r.x0 = std::min(r.x0, x);
                r.y0 = std::min(r.y0, y);
                r.x1 = std::max(r.x1, x + 1);
                r.y1 = std::max(r.y1, y + 1);
            }
    if (r.x1 == 0) return {};
    return r;
}

}  // namespace plg
