#include "plg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "plg/error.hpp"
#include "plg/imageio.hpp"
#include "plg/random.hpp"

namespace plg {

namespace {

struct RgbF {
    double r = 0, g = 0, b = 0;
};

class RgbField {
public:
    RgbField(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h) {}
    int width() const { return w_; }
    int height() const { return h_; }
    RgbF& at(int x, int y) { return px_[static_cast<std::size_t>(y) * w_ + x]; }
    const RgbF& at(int x, int y) const { return px_[static_cast<std::size_t>(y) * w_ + x]; }

    RgbF sample(double x, double y) const {
        x = std::clamp(x, 0.0, w_ - 1.0);
        y = std::clamp(y, 0.0, h_ - 1.0);
        const int x0 = std::min(static_cast<int>(x), w_ - 2 < 0 ? 0 : w_ - 2);
        const int y0 = std::min(static_cast<int>(y), h_ - 2 < 0 ? 0 : h_ - 2);
        const int x1 = std::min(x0 + 1, w_ - 1), y1 = std::min(y0 + 1, h_ - 1);
        const double fx = x - x0, fy = y - y0;
        auto lerp = [](const RgbF& a, const RgbF& b, double t) {
            return RgbF{a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
        };
        return lerp(lerp(at(x0, y0), at(x1, y0), fx), lerp(at(x0, y1), at(x1, y1), fx), fy);
    }

private:
    int w_, h_;
    std::vector<RgbF> px_;
};

std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// Foliage: bilinear value noise over a coarse random grid plus sharp
// light/dark speckles that give the corner detector something to find.
RgbField make_world(int w, int h, int cell, Rng& rng) {
    cell = std::max(cell, 2);
    const int gw = w / cell + 2, gh = h / cell + 2;
    std::vector<RgbF> grid(static_cast<std::size_t>(gw) * gh);
    for (auto& c : grid) {
        const double t = uniform01(rng);
        c = {30 + 70 * t + uniform_real(rng, -10, 10), 55 + 85 * t + uniform_real(rng, -15, 15),
             20 + 40 * t + uniform_real(rng, -10, 10)};
    }
    RgbField world(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double gx = static_cast<double>(x) / cell, gy = static_cast<double>(y) / cell;
            const int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
            const double fx = gx - ix, fy = gy - iy;
            auto g = [&](int i, int j) { return grid[static_cast<std::size_t>(j) * gw + i]; };
            const RgbF a = g(ix, iy), b = g(ix + 1, iy), c = g(ix, iy + 1), d = g(ix + 1, iy + 1);
            auto mix = [&](double RgbF::*ch) {
                return (a.*ch * (1 - fx) + b.*ch * fx) * (1 - fy) + (c.*ch * (1 - fx) + d.*ch * fx) * fy;
            };
            world.at(x, y) = {mix(&RgbF::r), mix(&RgbF::g), mix(&RgbF::b)};
        }
    const long n_speckles = static_cast<long>(w) * h / 120;
    for (long s = 0; s < n_speckles; ++s) {
        const int cx = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(w)));
        const int cy = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(h)));
        const int r = 1 + static_cast<int>(uniform_index(rng, 3));
        const double delta = uniform_real(rng, -70, 70);
        for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
                const int x = cx + dx, y = cy + dy;
                if (x < 0 || y < 0 || x >= w || y >= h || dx * dx + dy * dy > r * r) continue;
                RgbF& p = world.at(x, y);
                p.r += delta;
                p.g += delta;
                p.b += delta * 0.7;
            }
    }
    return world;
}

// Bunch texture: spherical berries with a highlight, dark gaps between them.
RgbField make_bunch(const SynthObject& o, Rng& rng) {
    const int pw = static_cast<int>(std::ceil(2 * o.rx)) + 4, ph = static_cast<int>(std::ceil(2 * o.ry)) + 4;
    const double br = std::clamp(std::min(o.rx, o.ry) / 4.0, 3.0, 7.0);
    struct Berry {
        double x, y, r;
    };
    std::vector<Berry> berries;
    const double step = 1.6 * br;
    int row = 0;
    for (double y = 0; y < ph; y += step * 0.87, ++row)
        for (double x = (row % 2) * step * 0.5; x < pw; x += step)
            berries.push_back({x + uniform_real(rng, -0.25, 0.25) * br, y + uniform_real(rng, -0.25, 0.25) * br,
                               br * uniform_real(rng, 0.85, 1.15)});
    const RgbF base{static_cast<double>(o.color[0]), static_cast<double>(o.color[1]), static_cast<double>(o.color[2])};
    RgbField patch(pw, ph);
    for (int y = 0; y < ph; ++y)
        for (int x = 0; x < pw; ++x) {
            double best = -1;
            const Berry* hit = nullptr;
            for (const auto& b : berries) {
                const double d2 = ((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (b.r * b.r);
                if (d2 < 1 && 1 - d2 > best) {
                    best = 1 - d2;
                    hit = &b;
                }
            }
            if (!hit) {
                patch.at(x, y) = {base.r * 0.35, base.g * 0.35, base.b * 0.35};
                continue;
            }
            const double shade = 0.55 + 0.45 * std::sqrt(best);
            const double hx = x - (hit->x - 0.35 * hit->r), hy = y - (hit->y - 0.35 * hit->r);
            const double spec = 70 * std::exp(-(hx * hx + hy * hy) / (0.09 * hit->r * hit->r));
            patch.at(x, y) = {base.r * shade + spec, base.g * shade + spec, base.b * shade + spec};
        }
    return patch;
}

Point2 object_offset(const SynthObject& o, int f) {
    if (o.motion == MotionKind::Linear) return {o.vx * f, o.vy * f};
    const double ph = 2 * std::numbers::pi * f / std::max(o.period, 1.0);
    return {o.vx * std::sin(ph), o.vy * std::sin(ph)};
}

bool occluded(const std::vector<Occlusion>& occ, int obj, int f) {
    return std::any_of(occ.begin(), occ.end(),
                       [&](const Occlusion& o) { return o.object == obj && f >= o.begin && f < o.end; });
}

}  // namespace

std::string frame_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%04d", index);
    return buf;
}

SynthSequence synth_generate(const SynthScenario& sc) {
    if (sc.n_frames < 1 || sc.width < 8 || sc.height < 8) throw Error("synth: invalid frame count or size");
    for (std::size_t i = 0; i < sc.objects.size(); ++i) {
        const auto& o = sc.objects[i];
        if (!(o.rx > 0 && o.ry > 0)) throw Error("synth: object " + std::to_string(i) + " has non-positive radius");
        if (2 * o.rx > sc.width || 2 * o.ry > sc.height)
            throw Error("synth: object " + std::to_string(i) + " is larger than the frame");
    }
    for (const auto& oc : sc.occlusions)
        if (oc.object < 0 || oc.object >= static_cast<int>(sc.objects.size()))
            throw Error("synth: occlusion refers to unknown object " + std::to_string(oc.object));

    Rng rng(sc.seed);
    const double last = sc.n_frames - 1;
    const double min_cx = std::min(0.0, sc.pan_x * last), max_cx = std::max(0.0, sc.pan_x * last);
    const double min_cy = std::min(0.0, sc.pan_y * last), max_cy = std::max(0.0, sc.pan_y * last);
    const int pad = 4;
    const int ww = static_cast<int>(std::ceil(max_cx - min_cx)) + sc.width + 2 * pad;
    const int wh = static_cast<int>(std::ceil(max_cy - min_cy)) + sc.height + 2 * pad;
    const RgbField world = make_world(ww, wh, sc.texture_cell, rng);
    const RgbField shade = make_world(ww, wh, sc.texture_cell / 2 + 2, rng);
    std::vector<RgbField> patches;
    for (const auto& o : sc.objects) patches.push_back(make_bunch(o, rng));

    SynthSequence seq;
    seq.occlusions = sc.occlusions;
    std::vector<Track> tracks(sc.objects.size());
    for (std::size_t i = 0; i < tracks.size(); ++i) tracks[i].id = static_cast<int>(i) + 1;

    const ImageSize size{sc.width, sc.height};
    std::vector<int> owner(static_cast<std::size_t>(sc.width) * sc.height);
    for (int f = 0; f < sc.n_frames; ++f) {
        const double camx = sc.pan_x * f - min_cx + pad, camy = sc.pan_y * f - min_cy + pad;
        PixelImage img(sc.width, sc.height, 3);
        std::vector<RgbF> buf(owner.size());
        std::fill(owner.begin(), owner.end(), -1);
        for (int y = 0; y < sc.height; ++y)
            for (int x = 0; x < sc.width; ++x) buf[static_cast<std::size_t>(y) * sc.width + x] = world.sample(x + camx, y + camy);

        std::vector<BBox> boxes(sc.objects.size());
        for (std::size_t i = 0; i < sc.objects.size(); ++i) {
            const auto& o = sc.objects[i];
            const Point2 d = object_offset(o, f);
            const double cx = o.x + d.x - sc.pan_x * f, cy = o.y + d.y - sc.pan_y * f;
            boxes[i] = BBox::from_center(cx, cy, 2 * o.rx, 2 * o.ry);
            const bool hidden = occluded(sc.occlusions, static_cast<int>(i), f);
            // Occluding foliage is slightly larger than the bunch.
            const double grow = hidden ? 1.2 : 1.0;
            const double ex = o.rx * grow, ey = o.ry * grow;
            const int x0 = std::max(0, static_cast<int>(std::floor(cx - ex))), x1 = std::min(sc.width, static_cast<int>(std::ceil(cx + ex)) + 1);
            const int y0 = std::max(0, static_cast<int>(std::floor(cy - ey))), y1 = std::min(sc.height, static_cast<int>(std::ceil(cy + ey)) + 1);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) {
                    const double u = (x + 0.5 - cx) / ex, v = (y + 0.5 - cy) / ey;
                    if (u * u + v * v > 1) continue;
                    const std::size_t k = static_cast<std::size_t>(y) * sc.width + x;
                    if (hidden) {
                        const RgbF s = shade.sample(x + camx, y + camy);
                        buf[k] = {s.r * 0.6, s.g * 0.75, s.b * 0.5};
                        owner[k] = -1;
                    } else {
                        const auto& p = patches[i];
                        buf[k] = p.sample(x + 0.5 - cx + p.width() / 2.0, y + 0.5 - cy + p.height() / 2.0);
                        owner[k] = static_cast<int>(i);
                    }
                }
        }
        for (std::size_t k = 0; k < buf.size(); ++k) {
            img.data()[3 * k] = to_u8(buf[k].r);
            img.data()[3 * k + 1] = to_u8(buf[k].g);
            img.data()[3 * k + 2] = to_u8(buf[k].b);
        }

        std::vector<Detection> dets;
        std::vector<int> ids;
        std::vector<PixelImage> masks;
        for (std::size_t i = 0; i < sc.objects.size(); ++i) {
            if (occluded(sc.occlusions, static_cast<int>(i), f)) continue;
            const BBox& full = boxes[i];
            const double x0 = std::max(0.0, full.x), y0 = std::max(0.0, full.y);
            const double x1 = std::min<double>(sc.width, full.right()), y1 = std::min<double>(sc.height, full.bottom());
            if (x1 <= x0 || y1 <= y0) continue;
            const BBox clipped{x0, y0, x1 - x0, y1 - y0};
            if (clipped.area() < sc.min_visible * full.area()) continue;
            dets.push_back({f, clipped, 1.0, 0});
            ids.push_back(static_cast<int>(i) + 1);
            tracks[i].observations.push_back({f, clipped, ObsSource::Detected});
            if (sc.with_masks) {
                PixelImage m = make_mask(size);
                for (std::size_t k = 0; k < owner.size(); ++k)
                    if (owner[k] == static_cast<int>(i)) m.data()[k] = 255;
                masks.push_back(std::move(m));
            }
        }
        seq.frames.push_back(std::move(img));
        seq.gt_dets.push_back(std::move(dets));
        seq.gt_ids.push_back(std::move(ids));
        if (sc.with_masks) seq.gt_masks.push_back(std::move(masks));
    }
    for (auto& t : tracks)
        if (!t.observations.empty()) seq.gt_tracks.push_back(std::move(t));
    return seq;
}

namespace {

constexpr std::array<std::array<std::uint8_t, 3>, 5> kPalette{{
    {150, 190, 80}, {120, 50, 110}, {175, 200, 95}, {95, 35, 75}, {165, 150, 60},
}};

}  // namespace

SynthScenario random_scenario(int n_objects, int n_frames, int width, int height, double pan_x, double pan_y,
                              std::uint64_t seed) {
    SynthScenario sc;
    sc.seed = seed;
    sc.n_frames = n_frames;
    sc.width = width;
    sc.height = height;
    sc.pan_x = pan_x;
    sc.pan_y = pan_y;
    Rng rng(seed ^ 0x5bd1e995ULL);
    const double last = n_frames - 1;
    const double wx0 = std::min(0.0, pan_x * last), wx1 = std::max(0.0, pan_x * last) + width;
    const double wy0 = std::min(0.0, pan_y * last), wy1 = std::max(0.0, pan_y * last) + height;
    const double rmax = std::min(width, height) / 7.0;
    for (int attempt = 0; attempt < 2000 && static_cast<int>(sc.objects.size()) < n_objects; ++attempt) {
        SynthObject o;
        o.rx = uniform_real(rng, 0.6, 1.0) * rmax * 0.8;
        o.ry = std::min(o.rx * uniform_real(rng, 1.1, 1.4), height / 2.0 - 1);
        o.x = uniform_real(rng, wx0 + o.rx, wx1 - o.rx);
        o.y = uniform_real(rng, wy0 + o.ry, wy1 - o.ry);
        o.color = kPalette[uniform_index(rng, kPalette.size())];
        bool clear = true;
        for (const auto& p : sc.objects) {
            const double dx = p.x - o.x, dy = p.y - o.y;
            const double need = 1.15 * (std::max(p.rx, p.ry) + std::max(o.rx, o.ry));
            if (dx * dx + dy * dy < need * need) clear = false;
        }
        if (clear) sc.objects.push_back(o);
    }
    return sc;
}

SynthScenario make_scenario(const std::string& preset, std::uint64_t seed) {
    SynthScenario sc;
    sc.seed = seed;
    if (preset == "easy") {
        sc.n_frames = 40;
        sc.pan_x = 1.0;
        sc.objects = {{90, 110, 22, 28, kPalette[0]}, {180, 125, 24, 30, kPalette[1]}, {265, 115, 20, 27, kPalette[2]}};
    } else if (preset == "skiptrend") {
        sc = random_scenario(12, 100, 320, 240, 3.0, 0.0, seed);
    } else if (preset == "occlusion") {
        sc.n_frames = 14;
        sc.pan_x = 1.0;
        sc.objects = {{140, 120, 26, 32, kPalette[0]}};
        sc.occlusions = {{0, 5, 8}};
    } else if (preset == "crossing") {
        sc.n_frames = 30;
        SynthObject a{60, 115, 22, 28, kPalette[0]};
        a.vx = 7.0;
        SynthObject b{260, 125, 22, 28, kPalette[1]};
        b.vx = -7.0;
        sc.objects = {a, b};
    } else if (preset == "hd") {
        sc = random_scenario(10, 2, 1280, 720, 4.0, 1.0, seed);
    } else {
        throw Error("unknown scenario preset '" + preset + "'");
    }
    return sc;
}

std::vector<std::vector<Detection>> simulate_detector(const SynthSequence& seq, const DetectorNoise& noise) {
    std::vector<std::vector<Detection>> out(seq.frames.size());
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        Rng rng(noise.seed * 0x9e3779b97f4a7c15ULL + f + 1);
        const ImageSize size = seq.frames[f].size();
        for (const auto& g : seq.gt_dets[f]) {
            if (uniform01(rng) < noise.miss_rate) continue;
            BBox b = g.bbox;
            if (noise.box_sigma > 0) {
                const double dx = standard_normal(rng) * noise.box_sigma * b.w;
                const double dy = standard_normal(rng) * noise.box_sigma * b.h;
                const double sw = std::max(0.2, 1 + standard_normal(rng) * noise.box_sigma);
                const double sh = std::max(0.2, 1 + standard_normal(rng) * noise.box_sigma);
                b = BBox::from_center(b.cx() + dx, b.cy() + dy, b.w * sw, b.h * sh);
                const auto c = clamp_box(b, size, false);
                if (!c.valid) continue;
                b = c.box;
            }
            out[f].push_back({static_cast<int>(f), b, uniform_real(rng, noise.conf_lo, noise.conf_hi), 0});
        }
        double fp = noise.fp_rate;
        while (fp > 0) {
            if (fp < 1 && uniform01(rng) >= fp) break;
            fp -= 1;
            const double w = uniform_real(rng, 0.08, 0.2) * size.width, h = uniform_real(rng, 0.1, 0.25) * size.height;
            const BBox b{uniform_real(rng, 0, size.width - w), uniform_real(rng, 0, size.height - h), w, h};
            out[f].push_back({static_cast<int>(f), b, uniform_real(rng, 0.1, 0.7), 0});
        }
    }
    return out;
}

void write_synth(const std::filesystem::path& dir, const SynthSequence& seq) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "frames");
    fs::create_directories(dir / "gt" / "labels");
    MaskDataset masks;
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        const std::string stem = frame_stem(static_cast<int>(f));
        write_image(dir / "frames" / (stem + ".png"), seq.frames[f]);
        write_yolo_labels(dir / "gt" / "labels" / (stem + ".txt"), seq.gt_dets[f], seq.frames[f].size(), false);
        if (seq.gt_masks.empty()) continue;
        masks.images.push_back({stem, stem + ".png", seq.frames[f].width(), seq.frames[f].height()});
        for (std::size_t i = 0; i < seq.gt_dets[f].size(); ++i)
            masks.instances.push_back({stem, seq.gt_ids[f][i], seq.gt_masks[f][i], seq.gt_dets[f][i].bbox});
    }
    write_tracks(dir / "gt" / "tracks.json", seq.gt_tracks);
    if (!seq.gt_masks.empty()) {
        fs::create_directories(dir / "gt" / "masks");
        write_instance_masks(dir / "gt" / "masks" / "index.json", masks);
    }
}

}  // namespace plg
