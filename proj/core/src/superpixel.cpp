#include "plg/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "plg/error.hpp"

namespace plg {

namespace {

// sRGB companding inverse, tabulated for 8-bit input.
const std::array<double, 256>& linear_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double c = i / 255.0;
            t[static_cast<std::size_t>(i)] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return table;
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

std::array<double, 3> srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) noexcept {
    const auto& lin = linear_table();
    const double r = lin[r8], g = lin[g8], b = lin[b8];
    // sRGB -> XYZ (D65), then normalize by the D65 white point.
    const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
    const double y = (0.2126729 * r + 0.7151522 * g + 0.0721750 * b) / 1.00000;
    const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
    const double fx = lab_f(x), fy = lab_f(y), fz = lab_f(z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::vector<std::size_t> segment_sizes(const SuperpixelMap& map) {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(map.n_labels), 0);
    for (int l : map.labels) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

namespace {

struct Center {
    double l, a, b, x, y;
};

// Merges pieces that are not the main component of their label, or that are
// too small, into their largest neighbour. Relabels 0..L-1 in scan order.
int enforce_connectivity(std::vector<int>& labels, int w, int h, std::size_t min_size) {
    const std::size_t n = labels.size();
    std::vector<int> comp(n, -1);
    std::vector<std::size_t> comp_size;
    std::vector<int> comp_label;
    std::vector<std::size_t> first_pixel;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] >= 0) continue;
        const int c = static_cast<int>(comp_size.size());
        const int lab = labels[start];
        std::size_t size = 0;
        comp[start] = c;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++size;
            const int x = static_cast<int>(p % static_cast<std::size_t>(w)), y = static_cast<int>(p / static_cast<std::size_t>(w));
            const int nx[4] = {x - 1, x + 1, x, x};
            const int ny[4] = {y, y, y - 1, y + 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
                const std::size_t q = static_cast<std::size_t>(ny[k]) * w + nx[k];
                if (comp[q] < 0 && labels[q] == lab) {
                    comp[q] = c;
                    stack.push_back(q);
                }
            }
        }
        comp_size.push_back(size);
        comp_label.push_back(lab);
        first_pixel.push_back(start);
    }
    const std::size_t nc = comp_size.size();

    // Main component per original label (largest; ties to the first found).
    std::vector<int> main_comp;
    for (std::size_t c = 0; c < nc; ++c) {
        const auto lab = static_cast<std::size_t>(comp_label[c]);
        if (main_comp.size() <= lab) main_comp.resize(lab + 1, -1);
        if (main_comp[lab] < 0 || comp_size[c] > comp_size[static_cast<std::size_t>(main_comp[lab])])
            main_comp[lab] = static_cast<int>(c);
    }

    // Component adjacency.
    std::vector<std::vector<int>> adj(nc);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            if (x + 1 < w && comp[p] != comp[p + 1]) {
                adj[static_cast<std::size_t>(comp[p])].push_back(comp[p + 1]);
                adj[static_cast<std::size_t>(comp[p + 1])].push_back(comp[p]);
            }
            if (y + 1 < h && comp[p] != comp[p + static_cast<std::size_t>(w)]) {
                adj[static_cast<std::size_t>(comp[p])].push_back(comp[p + static_cast<std::size_t>(w)]);
                adj[static_cast<std::size_t>(comp[p + static_cast<std::size_t>(w)])].push_back(comp[p]);
            }
        }

    std::vector<int> parent(nc);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int c) {
        while (parent[static_cast<std::size_t>(c)] != c) {
            parent[static_cast<std::size_t>(c)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(c)])];
            c = parent[static_cast<std::size_t>(c)];
        }
        return c;
    };
    std::vector<std::size_t> merged_size = comp_size;

    std::vector<int> orphans;
    for (std::size_t c = 0; c < nc; ++c) {
        const bool is_main = main_comp[static_cast<std::size_t>(comp_label[c])] == static_cast<int>(c);
        if (!is_main || comp_size[c] < min_size) orphans.push_back(static_cast<int>(c));
    }
    std::stable_sort(orphans.begin(), orphans.end(),
                     [&](int a, int b) { return comp_size[static_cast<std::size_t>(a)] < comp_size[static_cast<std::size_t>(b)]; });
    for (int o : orphans) {
        const int ro = find(o);
        int best = -1;
        for (int nb : adj[static_cast<std::size_t>(o)]) {
            const int r = find(nb);
            if (r == ro) continue;
            if (best < 0 || merged_size[static_cast<std::size_t>(r)] > merged_size[static_cast<std::size_t>(best)] ||
                (merged_size[static_cast<std::size_t>(r)] == merged_size[static_cast<std::size_t>(best)] && r < best))
                best = r;
        }
        if (best < 0) continue;
        parent[static_cast<std::size_t>(ro)] = best;
        merged_size[static_cast<std::size_t>(best)] += merged_size[static_cast<std::size_t>(ro)];
    }

    std::vector<int> new_label(nc, -1);
    int next = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const auto r = static_cast<std::size_t>(find(comp[p]));
        if (new_label[r] < 0) new_label[r] = next++;
        labels[p] = new_label[r];
    }
    return next;
}

}  // namespace

SuperpixelMap slic(const PixelImage& image, const SlicParams& params) {
    const int w = image.width(), h = image.height();
    const std::size_t n = image.pixel_count();
    if (params.k < 1 || static_cast<std::size_t>(params.k) > n)
        throw Error("slic: K=" + std::to_string(params.k) + " must lie in [1, " + std::to_string(n) + "]");

    const PixelImage rgb = to_rgb(image);
    std::vector<std::array<double, 3>> lab(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto px = rgb.data().subspan(3 * i, 3);
        lab[i] = srgb_to_lab(px[0], px[1], px[2]);
    }

    const double S = std::sqrt(static_cast<double>(n) / params.k);
    const int nx = std::clamp(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(params.k) * w / h) - 1e-9)), 1, w);
    const int ny = std::clamp(static_cast<int>(std::lround(static_cast<double>(params.k) / nx)), 1, h);
    const double step_x = static_cast<double>(w) / nx, step_y = static_cast<double>(h) / ny;

    auto gradient = [&](int x, int y) {
        const auto& l = lab[static_cast<std::size_t>(y) * w + std::max(x - 1, 0)];
        const auto& r = lab[static_cast<std::size_t>(y) * w + std::min(x + 1, w - 1)];
        const auto& u = lab[static_cast<std::size_t>(std::max(y - 1, 0)) * w + x];
        const auto& d = lab[static_cast<std::size_t>(std::min(y + 1, h - 1)) * w + x];
        double g = 0;
        for (int c = 0; c < 3; ++c) g += (r[c] - l[c]) * (r[c] - l[c]) + (d[c] - u[c]) * (d[c] - u[c]);
        return g;
    };

    std::vector<Center> centers;
    centers.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int sx = std::min(static_cast<int>((i + 0.5) * step_x), w - 1);
            int sy = std::min(static_cast<int>((j + 0.5) * step_y), h - 1);
            int bx = sx, by = sy;
            double bg = gradient(sx, sy);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = sx + dx, yy = sy + dy;
                    if (xx < 0 || yy < 0 || xx >= w || yy >= h) continue;
                    const double g = gradient(xx, yy);
                    if (g < bg) {
                        bg = g;
                        bx = xx;
                        by = yy;
                    }
                }
            const auto& c = lab[static_cast<std::size_t>(by) * w + bx];
            centers.push_back({c[0], c[1], c[2], static_cast<double>(bx), static_cast<double>(by)});
        }

    SuperpixelMap map;
    map.width = w;
    map.height = h;
    map.requested_k = params.k;
    map.compactness = params.compactness;
    map.labels.resize(n);
    // Initial labels: grid cell, so every pixel has a label even if no center
    // reaches it during the windowed search.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int i = std::min(static_cast<int>(x / step_x), nx - 1);
            const int j = std::min(static_cast<int>(y / step_y), ny - 1);
            map.labels[static_cast<std::size_t>(y) * w + x] = j * nx + i;
        }

    const double spatial = (params.compactness / S) * (params.compactness / S);
    const double win_x = std::max(S, step_x), win_y = std::max(S, step_y);
    std::vector<double> dist(n);
    for (int iter = 0; iter < params.max_iter; ++iter) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        bool changed = false;
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const Center& c = centers[k];
            const int x0 = std::max(0, static_cast<int>(std::floor(c.x - win_x)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + win_x)));
            const int y0 = std::max(0, static_cast<int>(std::floor(c.y - win_y)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + win_y)));
            for (int y = y0; y <= y1; ++y)
                for (int x = x0; x <= x1; ++x) {
                    const std::size_t p = static_cast<std::size_t>(y) * w + x;
                    const auto& v = lab[p];
                    const double dl = v[0] - c.l, da = v[1] - c.a, db = v[2] - c.b;
                    const double dx = x - c.x, dy = y - c.y;
                    const double d = dl * dl + da * da + db * db + spatial * (dx * dx + dy * dy);
                    if (d < dist[p]) {
                        dist[p] = d;
                        if (map.labels[p] != static_cast<int>(k)) {
                            map.labels[p] = static_cast<int>(k);
                            changed = true;
                        }
                    }
                }
        }
        std::vector<Center> acc(centers.size(), Center{0, 0, 0, 0, 0});
        std::vector<std::size_t> count(centers.size(), 0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t p = static_cast<std::size_t>(y) * w + x;
                const auto k = static_cast<std::size_t>(map.labels[p]);
                acc[k].l += lab[p][0];
                acc[k].a += lab[p][1];
                acc[k].b += lab[p][2];
                acc[k].x += x;
                acc[k].y += y;
                ++count[k];
            }
        for (std::size_t k = 0; k < centers.size(); ++k) {
            if (!count[k]) continue;
            const double inv = 1.0 / static_cast<double>(count[k]);
            centers[k] = {acc[k].l * inv, acc[k].a * inv, acc[k].b * inv, acc[k].x * inv, acc[k].y * inv};
        }
        if (!changed && iter > 0) break;
    }

    if (params.enforce_connectivity) {
        const auto min_size = static_cast<std::size_t>(params.min_size_factor * static_cast<double>(n) / params.k);
        map.n_labels = enforce_connectivity(map.labels, w, h, min_size);
    } else {
        // Compact the label range.
        std::vector<int> remap(centers.size(), -1);
        int next = 0;
        for (auto& l : map.labels) {
            auto& r = remap[static_cast<std::size_t>(l)];
            if (r < 0) r = next++;
            l = r;
        }
        map.n_labels = next;
    }
    return map;
}

}  // namespace plg
