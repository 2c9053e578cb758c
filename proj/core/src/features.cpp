#include "plg/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "plg/imageio.hpp"
#include "plg/log.hpp"
#include "plg/random.hpp"

namespace plg {

namespace {

constexpr int kBorder = 3;          // Sobel (1) + binomial window (2)
constexpr int kBoxRadius = 2;       // descriptor smoothing
constexpr int kPatternExtent = kPatchRadius - kBoxRadius - 1;
constexpr double kWindowRadius = 2.0;

// Separable [1 4 6 4 1] / 16 with clamped borders.
void binomial5(std::vector<float>& img, int w, int h, std::vector<float>& tmp) {
    tmp.resize(img.size());
    for (int y = 0; y < h; ++y) {
        const float* row = img.data() + static_cast<std::size_t>(y) * w;
        float* out = tmp.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            auto at = [&](int xx) { return row[std::clamp(xx, 0, w - 1)]; };
            out[x] = (at(x - 2) + 4 * at(x - 1) + 6 * row[x] + 4 * at(x + 1) + at(x + 2)) * (1.0f / 16);
        }
    }
    for (int y = 0; y < h; ++y) {
        auto r = [&](int yy) { return tmp.data() + static_cast<std::size_t>(std::clamp(yy, 0, h - 1)) * w; };
        const float *a = r(y - 2), *b = r(y - 1), *c = r(y), *d = r(y + 1), *e = r(y + 2);
        float* out = img.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) out[x] = (a[x] + 4 * b[x] + 6 * c[x] + 4 * d[x] + e[x]) * (1.0f / 16);
    }
}

}  // namespace

std::vector<Keypoint> detect_keypoints(const PixelImage& img, int max_n, const DetectorParams& params) {
    const int w = img.width(), h = img.height();
    if (max_n <= 0) return {};
    if (w < 2 * kBorder + 1 || h < 2 * kBorder + 1) {
        log::warn("detect_keypoints: image " + std::to_string(w) + "x" + std::to_string(h) +
                  " is smaller than the detector window");
        return {};
    }
    const PixelImage gray = to_gray(img);
    const auto px = gray.data();
    const std::size_t n = gray.pixel_count();

    std::vector<float> ixx(n, 0.f), iyy(n, 0.f), ixy(n, 0.f);
    for (int y = 1; y < h - 1; ++y) {
        const std::uint8_t* r0 = px.data() + static_cast<std::size_t>(y - 1) * w;
        const std::uint8_t* r1 = r0 + w;
        const std::uint8_t* r2 = r1 + w;
        for (int x = 1; x < w - 1; ++x) {
            const float gx = ((r0[x + 1] - r0[x - 1]) + 2 * (r1[x + 1] - r1[x - 1]) + (r2[x + 1] - r2[x - 1])) * 0.125f;
            const float gy = ((r2[x - 1] - r0[x - 1]) + 2 * (r2[x] - r0[x]) + (r2[x + 1] - r0[x + 1])) * 0.125f;
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            ixx[i] = gx * gx;
            iyy[i] = gy * gy;
            ixy[i] = gx * gy;
        }
    }
    std::vector<float> tmp;
    binomial5(ixx, w, h, tmp);
    binomial5(iyy, w, h, tmp);
    binomial5(ixy, w, h, tmp);

    std::vector<float>& resp = tmp;
    resp.assign(n, 0.f);
    const float k = static_cast<float>(params.harris_k);
    for (std::size_t i = 0; i < n; ++i) {
        const float a = ixx[i], b = iyy[i], c = ixy[i];
        const float tr = a + b;
        resp[i] = a * b - c * c - k * tr * tr;
    }

    struct Candidate {
        float r;
        int x, y;
    };
    std::vector<Candidate> cands;
    const int rad = std::max(params.nms_radius, 1);
    const float thresh = static_cast<float>(params.min_response);
    for (int y = kBorder; y < h - kBorder; ++y) {
        for (int x = kBorder; x < w - kBorder; ++x) {
            const float r = resp[static_cast<std::size_t>(y) * w + x];
            if (!(r > thresh)) continue;
            bool is_max = true;
            for (int dy = -rad; dy <= rad && is_max; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= h) continue;
                for (int dx = -rad; dx <= rad; ++dx) {
                    const int xx = x + dx;
                    if ((dx == 0 && dy == 0) || xx < 0 || xx >= w) continue;
                    const float o = resp[static_cast<std::size_t>(yy) * w + xx];
                    // Strict against earlier neighbours, non-strict against later ones:
                    // exactly one pixel of a plateau survives.
                    const bool earlier = dy < 0 || (dy == 0 && dx < 0);
                    if (earlier ? o >= r : o > r) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) cands.push_back({r, x, y});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.r != b.r) return a.r > b.r;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (cands.size() > static_cast<std::size_t>(max_n)) cands.resize(static_cast<std::size_t>(max_n));

    auto subpixel = [](float l, float c, float r) {
        const float denom = l - 2 * c + r;
        if (denom >= 0) return 0.0;
        return std::clamp(0.5 * (l - r) / denom, -0.5, 0.5);
    };
    std::vector<Keypoint> out;
    out.reserve(cands.size());
    for (const auto& c : cands) {
        const std::size_t i = static_cast<std::size_t>(c.y) * w + c.x;
        const double ox = subpixel(resp[i - 1], c.r, resp[i + 1]);
        const double oy = subpixel(resp[i - w], c.r, resp[i + w]);
        out.push_back({c.x + ox, c.y + oy, static_cast<double>(c.r), kWindowRadius});
    }
    return out;
}

std::span<const SamplePair> sampling_pattern() {
    // Isotropic Gaussian pairs (sigma = patch/5), clipped to the usable extent,
    // from a fixed seed. Built once; identical on every platform.
    static const std::vector<SamplePair> pattern = [] {
        Rng rng(0x9e3779b97f4a7c15ULL);
        const double sigma = (2.0 * kPatchRadius) / 5.0;
        auto coord = [&] {
            const double v = std::round(standard_normal(rng) * sigma);
            return static_cast<std::int8_t>(std::clamp(v, -double(kPatternExtent), double(kPatternExtent)));
        };
        std::vector<SamplePair> p;
        p.reserve(kDescriptorBits);
        while (p.size() < static_cast<std::size_t>(kDescriptorBits)) {
            SamplePair s{coord(), coord(), coord(), coord()};
            if (s.x1 == s.x2 && s.y1 == s.y2) continue;
            p.push_back(s);
        }
        return p;
    }();
    return pattern;
}

DescribeResult describe(const PixelImage& img, std::span<const Keypoint> kps) {
    DescribeResult res;
    const PixelImage gray = to_gray(img);
    const int w = gray.width(), h = gray.height();
    const int iw = w + 1;
    // Integral image; exact integer sums keep comparisons invariant to a
    // uniform brightness offset.
    std::vector<std::int64_t> integral(static_cast<std::size_t>(iw) * (h + 1), 0);
    for (int y = 0; y < h; ++y) {
        std::int64_t row = 0;
        for (int x = 0; x < w; ++x) {
            row += gray.at(x, y);
            integral[static_cast<std::size_t>(y + 1) * iw + x + 1] = integral[static_cast<std::size_t>(y) * iw + x + 1] + row;
        }
    }
    auto box = [&](int cx, int cy) {
        const int x0 = cx - kBoxRadius, y0 = cy - kBoxRadius;
        const int x1 = cx + kBoxRadius + 1, y1 = cy + kBoxRadius + 1;
        return integral[static_cast<std::size_t>(y1) * iw + x1] - integral[static_cast<std::size_t>(y0) * iw + x1] -
               integral[static_cast<std::size_t>(y1) * iw + x0] + integral[static_cast<std::size_t>(y0) * iw + x0];
    };

    const auto pattern = sampling_pattern();
    res.keypoints.reserve(kps.size());
    res.descriptors.reserve(kps.size());
    for (const auto& kp : kps) {
        const int cx = static_cast<int>(std::lround(kp.x));
        const int cy = static_cast<int>(std::lround(kp.y));
        if (cx < kPatchRadius || cy < kPatchRadius || cx >= w - kPatchRadius || cy >= h - kPatchRadius) {
            ++res.dropped;
            continue;
        }
        Descriptor d;
        for (int i = 0; i < kDescriptorBits; ++i) {
            const auto& s = pattern[static_cast<std::size_t>(i)];
            if (box(cx + s.x1, cy + s.y1) < box(cx + s.x2, cy + s.y2)) d.set(i);
        }
        res.keypoints.push_back(kp);
        res.descriptors.push_back(d);
    }
    if (res.dropped) log::debug("describe: dropped " + std::to_string(res.dropped) + " keypoints near the border");
    return res;
}

std::vector<MatchPair> brute_force_match(std::span<const Descriptor> desc_a,
                                         std::span<const Descriptor> desc_b, int max_dist) {
    std::vector<MatchPair> out;
    if (desc_a.empty() || desc_b.empty()) return out;
    const std::size_t na = desc_a.size(), nb = desc_b.size();
    std::vector<int> best_b(na, -1), best_b_dist(na, std::numeric_limits<int>::max());
    std::vector<int> best_a(nb, -1), best_a_dist(nb, std::numeric_limits<int>::max());
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) {
            const int d = hamming(desc_a[i], desc_b[j]);
            if (d < best_b_dist[i]) {
                best_b_dist[i] = d;
                best_b[i] = static_cast<int>(j);
            }
            if (d < best_a_dist[j]) {
                best_a_dist[j] = d;
                best_a[j] = static_cast<int>(i);
            }
        }
    }
    for (std::size_t i = 0; i < na; ++i) {
        const int j = best_b[i];
        if (j < 0 || best_b_dist[i] > max_dist) continue;
        if (best_a[static_cast<std::size_t>(j)] != static_cast<int>(i)) continue;
        out.push_back({static_cast<int>(i), j, static_cast<double>(best_b_dist[i])});
    }
    return out;
}

FeatureSet HarrisBriefBackend::extract(const PixelImage& img) const {
    FeatureSet fs;
    fs.size = img.size();
    const PixelImage gray = to_gray(img);
    auto kps = detect_keypoints(gray, max_keypoints_, params_);
    auto desc = describe(gray, kps);
    fs.keypoints = std::move(desc.keypoints);
    fs.descriptors = std::move(desc.descriptors);
    return fs;
}

void write_keypoints_csv(const std::filesystem::path& path, int frame, std::span<const Keypoint> kps) {
    std::string out = "frame,x,y,response\n";
    char buf[128];
    for (const auto& k : kps) {
        const int n = std::snprintf(buf, sizeof buf, "%d,%.3f,%.3f,%.6g\n", frame, k.x, k.y, k.response);
        out.append(buf, static_cast<std::size_t>(n));
    }
    write_text_file(path, out);
}

void write_matches_csv(const std::filesystem::path& path, std::span<const MatchPair> matches) {
    std::string out = "ia,ib,dist\n";
    for (const auto& m : matches)
        out += std::to_string(m.idx_a) + "," + std::to_string(m.idx_b) + "," +
               std::to_string(static_cast<int>(m.distance)) + "\n";
    write_text_file(path, out);
}

}  // namespace plg
