#include "plg/imageio.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "plg/error.hpp"
#include "plg/log.hpp"

namespace plg {

using nlohmann::json;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Rasters
// ---------------------------------------------------------------------------

namespace {

std::string lower_ext(const fs::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e;
}

PixelImage read_png(const fs::path& path) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str()))
        throw IoError("cannot read PNG '" + path.string() + "': " + img.message);
    const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        std::string msg = img.message;
        png_image_free(&img);
        throw IoError("cannot decode PNG '" + path.string() + "': " + msg);
    }
    return PixelImage(static_cast<int>(img.width), static_cast<int>(img.height), color ? 3 : 1,
                      std::move(buf));
}

void write_png(const fs::path& path, const PixelImage& src) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(src.width());
    img.height = static_cast<png_uint_32>(src.height());
    img.format = src.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.string().c_str(), 0, src.data().data(), 0, nullptr))
        throw IoError("cannot write PNG '" + path.string() + "': " + img.message);
}

// Netpbm header token, skipping whitespace and '#' comments.
int read_pnm_int(std::istream& in, const fs::path& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    std::string tok;
    while (c != EOF && std::isdigit(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (tok.empty()) throw IoError("malformed PNM header in '" + path.string() + "'");
    return std::stoi(tok);
}

PixelImage read_pnm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6'))
        throw IoError("'" + path.string() + "' is not a binary PGM/PPM file");
    const int channels = magic[1] == '6' ? 3 : 1;
    const int w = read_pnm_int(in, path);
    const int h = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (maxval != 255) throw IoError("'" + path.string() + "': only 8-bit PNM is supported");
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
        throw IoError("'" + path.string() + "': truncated pixel data");
    return PixelImage(w, h, channels, std::move(buf));
}

void write_pnm(const fs::path& path, const PixelImage& img) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << (img.channels() == 3 ? "P6" : "P5") << '\n'
        << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.data().size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

PixelImage read_image(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("no such file '" + path.string() + "'");
    const std::string ext = lower_ext(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return read_pnm(path);
    throw IoError("unsupported image format '" + path.string() + "'");
}

void write_image(const fs::path& path, const PixelImage& img) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const std::string ext = lower_ext(path);
    if (ext == ".png") return write_png(path, img);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return write_pnm(path, img);
    throw IoError("unsupported image format '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Frame directories
// ---------------------------------------------------------------------------

FrameSequence load_frame_dir(const fs::path& dir, std::string_view pattern) {
    if (!fs::is_directory(dir)) throw IoError("frame directory '" + dir.string() + "' does not exist");
    const std::regex re{std::string(pattern), std::regex::ECMAScript | std::regex::icase};

    std::map<int, fs::path> by_index;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        std::smatch m;
        if (!std::regex_match(name, m, re) || m.size() < 2) continue;
        const int index = std::stoi(m[1].str());
        if (!by_index.emplace(index, entry.path()).second)
            throw IoError("duplicate frame index " + std::to_string(index) + " in '" + dir.string() +
                          "': '" + by_index[index].filename().string() + "' and '" + name + "'");
    }
    if (by_index.empty()) throw IoError("no frames in '" + dir.string() + "'");

    FrameSequence seq;
    for (auto& [index, path] : by_index) {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw IoError("unreadable frame '" + path.string() + "'");
        if (!seq.frames.empty()) {
            for (int missing = seq.frames.back().index + 1; missing < index; ++missing) {
                seq.missing.push_back(missing);
                log::warn("frame gap in '" + dir.string() + "': index " + std::to_string(missing) +
                          " missing");
            }
        }
        seq.frames.push_back({index, path});
    }
    return seq;
}

// ---------------------------------------------------------------------------
// YOLO
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

std::vector<Detection> parse_yolo_labels(std::string_view text, ImageSize size, int frame_index) {
    std::vector<Detection> dets;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto toks = split_ws(line);
        if (toks.empty()) continue;

        const std::string where = "line " + std::to_string(line_no);
        if (toks.size() != 5 && toks.size() != 6)
            throw ParseError(where + ": expected 'class cx cy w h [conf]', got " +
                             std::to_string(toks.size()) + " fields");
        Detection d;
        d.frame_index = frame_index;
        if (!parse_number(toks[0], d.class_id) || d.class_id < 0)
            throw ParseError(where + ": bad class id '" + std::string(toks[0]) + "'");
        double v[5] = {0, 0, 0, 0, 1.0};
        for (std::size_t i = 1; i < toks.size(); ++i) {
            if (!parse_number(toks[i], v[i - 1]))
                throw ParseError(where + ": bad number '" + std::string(toks[i]) + "'");
            if (!(v[i - 1] >= 0.0 && v[i - 1] <= 1.0))
                throw ParseError(where + ": value " + std::string(toks[i]) + " out of range [0,1]");
        }
        if (v[2] <= 0.0 || v[3] <= 0.0) throw ParseError(where + ": box width and height must be > 0");
        const double W = size.width, H = size.height;
        const BBox raw = BBox::from_center(v[0] * W, v[1] * H, v[2] * W, v[3] * H);
        d.bbox = clamp_box(raw, size, /*shift=*/false).box;
        d.confidence = v[4];
        dets.push_back(d);
    }
    return dets;
}

std::string format_yolo_labels(const std::vector<Detection>& dets, ImageSize size,
                               bool with_confidence) {
    std::string out;
    char buf[160];
    const double W = size.width, H = size.height;
    for (const auto& d : dets) {
        const int n = with_confidence
            ? std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f %.6f\n", d.class_id,
                            d.bbox.cx() / W, d.bbox.cy() / H, d.bbox.w / W, d.bbox.h / H,
                            d.confidence)
            : std::snprintf(buf, sizeof buf, "%d %.6f %.6f %.6f %.6f\n", d.class_id,
                            d.bbox.cx() / W, d.bbox.cy() / H, d.bbox.w / W, d.bbox.h / H);
        out.append(buf, static_cast<std::size_t>(n));
    }
    return out;
}

std::vector<Detection> read_yolo_labels(const fs::path& path, ImageSize size, int frame_index) {
    try {
        return parse_yolo_labels(read_text_file(path), size, frame_index);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_yolo_labels(const fs::path& path, const std::vector<Detection>& dets, ImageSize size,
                       bool with_confidence) {
    write_text_file(path, format_yolo_labels(dets, size, with_confidence));
}

// ---------------------------------------------------------------------------
// Instance masks
// ---------------------------------------------------------------------------

const MaskImageEntry* MaskDataset::find_image(std::string_view id) const noexcept {
    for (const auto& img : images)
        if (img.id == id) return &img;
    return nullptr;
}

std::string mask_filename(std::string_view image_id, int instance_id) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%04d.png", instance_id);
    std::string stem(image_id);
    std::replace(stem.begin(), stem.end(), '/', '_');
    return stem + buf;
}

MaskDataset read_instance_masks(const fs::path& index_json, const std::optional<fs::path>& mask_dir) {
    const fs::path base = mask_dir.value_or(index_json.parent_path());
    json j;
    try {
        j = json::parse(read_text_file(index_json));
    } catch (const json::exception& e) {
        throw ParseError(index_json.string() + ": " + e.what());
    }

    MaskDataset data;
    try {
        for (const auto& ji : j.at("images")) {
            MaskImageEntry e;
            e.id = ji.at("id").is_string() ? ji.at("id").get<std::string>()
                                           : std::to_string(ji.at("id").get<long long>());
            e.file = ji.at("file").get<std::string>();
            e.width = ji.at("width").get<int>();
            e.height = ji.at("height").get<int>();
            data.images.push_back(std::move(e));
        }
        for (const auto& jm : j.at("instances")) {
            InstanceMask m;
            m.image_id = jm.at("image_id").is_string() ? jm.at("image_id").get<std::string>()
                                                       : std::to_string(jm.at("image_id").get<long long>());
            m.instance_id = jm.at("instance_id").get<int>();
            const auto& b = jm.at("bbox");
            if (b.size() != 4) throw ParseError("bbox must have 4 entries");
            m.ref_bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};

            const MaskImageEntry* img = data.find_image(m.image_id);
            if (!img) throw ParseError("instance refers to unknown image id '" + m.image_id + "'");
            const fs::path mpath = base / jm.at("mask_file").get<std::string>();
            PixelImage raw = read_image(mpath);
            if (raw.width() != img->width || raw.height() != img->height)
                throw IoError("mask '" + mpath.string() + "' is " + std::to_string(raw.width()) + "x" +
                              std::to_string(raw.height()) + " but image '" + img->id + "' is " +
                              std::to_string(img->width) + "x" + std::to_string(img->height));
            raw = to_gray(raw);
            for (auto& v : raw.data()) v = v ? 255 : 0;
            m.mask = std::move(raw);
            data.instances.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw ParseError(index_json.string() + ": " + e.what());
    }
    return data;
}

void write_instance_masks(const fs::path& index_json, const MaskDataset& data,
                          const std::optional<fs::path>& mask_dir) {
    const fs::path base = mask_dir.value_or(index_json.parent_path());
    json j;
    j["images"] = json::array();
    j["instances"] = json::array();
    for (const auto& img : data.images)
        j["images"].push_back({{"id", img.id}, {"file", img.file}, {"width", img.width}, {"height", img.height}});

    for (const auto& m : data.instances) {
        const MaskImageEntry* img = data.find_image(m.image_id);
        if (!img) throw Error("instance refers to unknown image id '" + m.image_id + "'");
        if (m.mask.width() != img->width || m.mask.height() != img->height)
            throw Error("mask for instance " + std::to_string(m.instance_id) + " is " +
                        std::to_string(m.mask.width()) + "x" + std::to_string(m.mask.height()) +
                        " but image '" + img->id + "' is " + std::to_string(img->width) + "x" +
                        std::to_string(img->height));
        PixelImage bin = to_gray(m.mask);
        for (auto& v : bin.data()) v = v ? 255 : 0;
        const std::string file = mask_filename(m.image_id, m.instance_id);
        write_image(base / file, bin);
        j["instances"].push_back({{"image_id", m.image_id},
                                  {"instance_id", m.instance_id},
                                  {"mask_file", file},
                                  {"bbox", {m.ref_bbox.x, m.ref_bbox.y, m.ref_bbox.w, m.ref_bbox.h}},
                                  {"empty", count_set(bin) == 0}});
    }
    write_text_file(index_json, j.dump(2) + "\n");
}

}  // namespace plg
