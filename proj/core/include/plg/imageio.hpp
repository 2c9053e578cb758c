#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "plg/detection.hpp"
#include "plg/image.hpp"

namespace plg {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Raster files. PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) is read
// through libpng and reduced to 8-bit gray or RGB; binary PGM (P5) and PPM
// (P6) are handled directly.
// ---------------------------------------------------------------------------

PixelImage read_image(const fs::path& path);
void write_image(const fs::path& path, const PixelImage& img);  ///< by extension: .png/.pgm/.ppm

// ---------------------------------------------------------------------------
// Frame directories
// ---------------------------------------------------------------------------

struct FrameEntry {
    int index = 0;
    fs::path path;
};

struct FrameSequence {
    std::vector<FrameEntry> frames;  ///< strictly increasing index
    int fps_num = 10;
    int fps_den = 1;
    std::vector<int> missing;        ///< indices absent between first and last frame

    std::size_t size() const noexcept { return frames.size(); }
    PixelImage load(std::size_t pos) const { return read_image(frames.at(pos).path); }
};

/// Default pattern: any name containing a run of digits followed by a raster
/// extension; the last run of digits is the frame index.
inline constexpr std::string_view kDefaultFramePattern = R"(^.*?([0-9]+)\.(png|ppm|pgm)$)";

/// Lists frames whose filenames match `pattern` (ECMAScript regex, first
/// capture group = frame number). Throws IoError on a missing directory, on
/// "no frames" and on duplicated indices; gaps are recorded and logged.
FrameSequence load_frame_dir(const fs::path& dir, std::string_view pattern = kDefaultFramePattern);

// ---------------------------------------------------------------------------
// YOLO labels: "class cx cy w h [conf]" per line, normalized to [0, 1]
// ---------------------------------------------------------------------------

std::vector<Detection> parse_yolo_labels(std::string_view text, ImageSize size, int frame_index = 0);
std::string format_yolo_labels(const std::vector<Detection>& dets, ImageSize size,
                               bool with_confidence = true);
std::vector<Detection> read_yolo_labels(const fs::path& path, ImageSize size, int frame_index = 0);
void write_yolo_labels(const fs::path& path, const std::vector<Detection>& dets, ImageSize size,
                       bool with_confidence = true);

// ---------------------------------------------------------------------------
// Instance masks: JSON index + one binary PNG per instance
// ---------------------------------------------------------------------------

struct MaskImageEntry {
    std::string id;
    std::string file;  ///< source image, relative to the image directory
    int width = 0;
    int height = 0;
};

struct InstanceMask {
    std::string image_id;
    int instance_id = 0;
    PixelImage mask;  ///< single channel, values {0, 255}
    BBox ref_bbox;

    bool is_empty() const noexcept { return count_set(mask) == 0; }
};

struct MaskDataset {
    std::vector<MaskImageEntry> images;
    std::vector<InstanceMask> instances;

    const MaskImageEntry* find_image(std::string_view id) const noexcept;
};

/// Reads the index; mask files are resolved relative to `mask_dir`
/// (defaults to the index's directory). Any nonzero mask pixel becomes 255.
MaskDataset read_instance_masks(const fs::path& index_json,
                                const std::optional<fs::path>& mask_dir = std::nullopt);

/// Writes one PNG per instance into `mask_dir` (default: index directory)
/// and the JSON index. Empty masks are written and flagged "empty": true.
void write_instance_masks(const fs::path& index_json, const MaskDataset& data,
                          const std::optional<fs::path>& mask_dir = std::nullopt);

/// Canonical mask filename used by write_instance_masks.
std::string mask_filename(std::string_view image_id, int instance_id);

/// Reads a whole text file; IoError naming the path on failure.
std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, std::string_view text);

}  // namespace plg
