#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace plg {

struct ImageSize {
    int width = 0;
    int height = 0;
    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Row-major 8-bit raster with 1 (gray / mask) or 3 (RGB) interleaved channels.
class PixelImage {
public:
    PixelImage() = default;
    PixelImage(int width, int height, int channels, std::uint8_t fill = 0);
    PixelImage(int width, int height, int channels, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    ImageSize size() const noexcept { return {width_, height_}; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }

    std::uint8_t& at(int x, int y, int c = 0) noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const noexcept {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    std::span<std::uint8_t> data() noexcept { return data_; }
    std::span<const std::uint8_t> data() const noexcept { return data_; }
    const std::vector<std::uint8_t>& buffer() const noexcept { return data_; }

    friend bool operator==(const PixelImage&, const PixelImage&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Axis-aligned box in pixel units, (x, y) is the top-left corner.
struct BBox {
    double x = 0;
    double y = 0;
    double w = 0;
    double h = 0;

    double cx() const noexcept { return x + 0.5 * w; }
    double cy() const noexcept { return y + 0.5 * h; }
    double right() const noexcept { return x + w; }
    double bottom() const noexcept { return y + h; }
    double area() const noexcept { return w > 0 && h > 0 ? w * h : 0.0; }
    bool contains(double px, double py) const noexcept {
        return px >= x && px < x + w && py >= y && py < y + h;
    }

    static BBox from_center(double cx, double cy, double w, double h) noexcept {
        return {cx - 0.5 * w, cy - 0.5 * h, w, h};
    }

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Half-open integer pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const noexcept { return x1 - x0; }
    int height() const noexcept { return y1 - y0; }
    bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
    bool contains(int x, int y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

double intersection_area(const BBox& a, const BBox& b) noexcept;
double iou(const BBox& a, const BBox& b) noexcept;

/// Pixels whose centers fall inside the box, clipped to the image.
PixelRect pixel_rect(const BBox& box, ImageSize size) noexcept;

struct ClampResult {
    BBox box;
    bool truncated = false;  ///< true when the box had to be cropped rather than shifted
    bool valid = false;      ///< false when the box does not intersect the image at all
};

/// Moves a box inside the image keeping its size; crops only when it is larger
/// than the image (or when `shift` is false).
ClampResult clamp_box(const BBox& box, ImageSize size, bool shift = true) noexcept;

/// Integer luma, (77 R + 150 G + 29 B + 128) >> 8. Gray input is copied.
PixelImage to_gray(const PixelImage& img);

/// Three-channel copy; gray input is replicated.
PixelImage to_rgb(const PixelImage& img);

// Binary mask helpers. A mask is a single-channel PixelImage, nonzero = set.
PixelImage make_mask(ImageSize size);
std::size_t count_set(const PixelImage& mask) noexcept;
double mask_iou(const PixelImage& a, const PixelImage& b);
PixelRect mask_bounds(const PixelImage& mask) noexcept;

}  // namespace plg
