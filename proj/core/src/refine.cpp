#include "plg/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plg/error.hpp"
#include "plg/gmm.hpp"
#include "plg/log.hpp"
#include "plg/maxflow.hpp"

namespace plg {

namespace {

void require_mask(const PixelImage& mask, const char* who) {
    if (mask.empty() || mask.channels() != 1) throw Error(std::string(who) + ": mask must be a non-empty single-channel image");
}

bool touches_all_sides(const PixelImage& m, const PixelRect& r) {
    bool top = false, bottom = false, left = false, right = false;
    for (int x = r.x0; x < r.x1; ++x) {
        top = top || m.at(x, r.y0) != 0;
        bottom = bottom || m.at(x, r.y1 - 1) != 0;
    }
    for (int y = r.y0; y < r.y1; ++y) {
        left = left || m.at(r.x0, y) != 0;
        right = right || m.at(r.x1 - 1, y) != 0;
    }
    return top && bottom && left && right;
}

}  // namespace

PixelImage refine_dilation(const PixelImage& mask, const BBox& ref_bbox, const StructuringElement& elem) {
    require_mask(mask, "refine_dilation");
    const PixelRect rect = pixel_rect(ref_bbox, mask.size());
    PixelImage cur = make_mask(mask.size());
    std::size_t n = 0;
    if (!rect.empty())
        for (int y = rect.y0; y < rect.y1; ++y)
            for (int x = rect.x0; x < rect.x1; ++x)
                if (mask.at(x, y)) {
                    cur.at(x, y) = 255;
                    ++n;
                }
    if (n == 0) {
        log::warn("refine_dilation: mask has no pixel inside the reference box, returned unchanged");
        return mask;
    }

    PixelImage next = cur;
    while (!touches_all_sides(cur, rect)) {
        bool changed = false;
        for (int y = rect.y0; y < rect.y1; ++y)
            for (int x = rect.x0; x < rect.x1; ++x) {
                if (cur.at(x, y)) continue;
                for (const Offset& o : elem.offsets()) {
                    const int sx = x - o.dx, sy = y - o.dy;
                    if (rect.contains(sx, sy) && cur.at(sx, sy)) {
                        next.at(x, y) = 255;
                        changed = true;
                        break;
                    }
                }
            }
        if (!changed) break;
        cur = next;
    }
    return cur;
}

PixelImage refine_slic(const PixelImage& mask, const SuperpixelMap& sp, const SlicVoteParams& params) {
    require_mask(mask, "refine_slic");
    if (sp.width != mask.width() || sp.height != mask.height())
        throw Error("refine_slic: superpixel map is " + std::to_string(sp.width) + "x" + std::to_string(sp.height) +
                    " but mask is " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()));
    std::vector<std::size_t> total(static_cast<std::size_t>(sp.n_labels), 0), inside(total.size(), 0);
    for (std::size_t i = 0; i < sp.labels.size(); ++i) {
        const auto l = static_cast<std::size_t>(sp.labels[i]);
        ++total[l];
        if (mask.data()[i]) ++inside[l];
    }
    PixelImage out = make_mask(mask.size());
    for (std::size_t i = 0; i < sp.labels.size(); ++i) {
        const auto l = static_cast<std::size_t>(sp.labels[i]);
        const double c = static_cast<double>(inside[l]) / static_cast<double>(total[l]);
        bool set = mask.data()[i] != 0;
        if (c >= params.upper)
            set = true;
        else if (c <= params.lower)
            set = false;
        out.data()[i] = set ? 255 : 0;
    }
    return out;
}

std::size_t Trimap::count(TrimapLabel l) const noexcept {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

int trimap_band(const BBox& ref_bbox, double alpha, int max_band) {
    const double side = std::max(0.0, std::min(ref_bbox.w, ref_bbox.h));
    const int r = std::max(1, static_cast<int>(std::lround(alpha * side)));
    return std::min(r, std::max(1, max_band));
}

Trimap build_trimap(const PixelImage& mask, int r) {
    require_mask(mask, "build_trimap");
    const auto unit = StructuringElement::disk(1);
    const PixelImage inner = erode(mask, unit, r);
    const PixelImage outer = dilate(mask, unit, r);
    Trimap t{mask.width(), mask.height(), std::vector<TrimapLabel>(mask.pixel_count(), TrimapLabel::SureBg)};
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
        if (inner.data()[i])
            t.labels[i] = TrimapLabel::SureFg;
        else if (mask.data()[i])
            t.labels[i] = TrimapLabel::ProbFg;
        else if (outer.data()[i])
            t.labels[i] = TrimapLabel::ProbBg;
    }
    return t;
}

namespace {

bool is_fg(TrimapLabel l) { return l == TrimapLabel::SureFg || l == TrimapLabel::ProbFg; }
bool is_prob(TrimapLabel l) { return l == TrimapLabel::ProbFg || l == TrimapLabel::ProbBg; }

constexpr int kNeighbours[4][2] = {{1, 0}, {0, 1}, {1, 1}, {-1, 1}};  // half of the 8-neighbourhood

PixelImage fg_mask(const Trimap& t) {
    PixelImage m(t.width, t.height, 1);
    for (std::size_t i = 0; i < t.labels.size(); ++i) m.data()[i] = is_fg(t.labels[i]) ? 255 : 0;
    return m;
}

}  // namespace

PixelImage grabcut(const PixelImage& image, const Trimap& trimap, const GrabCutParams& params) {
    if (image.width() != trimap.width || image.height() != trimap.height)
        throw Error("grabcut: image and trimap sizes differ");
    if (params.n_iters < 1 || params.gmm_k < 1 || !(params.gamma > 0)) throw Error("grabcut: invalid parameters");

    // Region of interest: everything that is not SURE_BG, plus a margin that
    // supplies background samples.
    int x0 = trimap.width, y0 = trimap.height, x1 = 0, y1 = 0;
    std::size_t n_prob = 0;
    for (int y = 0; y < trimap.height; ++y)
        for (int x = 0; x < trimap.width; ++x) {
            const TrimapLabel l = trimap.at(x, y);
            if (l == TrimapLabel::SureBg) continue;
            if (is_prob(l)) ++n_prob;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x + 1);
            y1 = std::max(y1, y + 1);
        }
    if (n_prob == 0) {
        log::warn("grabcut: trimap has no probable pixels, returning the foreground unchanged");
        return fg_mask(trimap);
    }
    const int margin = std::max(8, (x1 - x0 + y1 - y0) / 8);
    x0 = std::max(0, x0 - margin);
    y0 = std::max(0, y0 - margin);
    x1 = std::min(trimap.width, x1 + margin);
    y1 = std::min(trimap.height, y1 + margin);
    const int rw = x1 - x0, rh = y1 - y0;
    const std::size_t n = static_cast<std::size_t>(rw) * static_cast<std::size_t>(rh);

    const PixelImage rgb = image.channels() == 3 ? image : to_rgb(image);
    std::vector<Color> z(n);
    std::vector<TrimapLabel> lab(n);
    for (int y = 0; y < rh; ++y)
        for (int x = 0; x < rw; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * rw + x;
            z[i] = Color(rgb.at(x0 + x, y0 + y, 0), rgb.at(x0 + x, y0 + y, 1), rgb.at(x0 + x, y0 + y, 2));
            lab[i] = trimap.at(x0 + x, y0 + y);
        }

    auto split = [&](std::vector<Color>& fg, std::vector<Color>& bg, std::vector<std::size_t>* fi,
                     std::vector<std::size_t>* bi) {
        fg.clear();
        bg.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (is_fg(lab[i])) {
                fg.push_back(z[i]);
                if (fi) fi->push_back(i);
            } else {
                bg.push_back(z[i]);
                if (bi) bi->push_back(i);
            }
        }
    };

    std::vector<Color> fg_px, bg_px;
    split(fg_px, bg_px, nullptr, nullptr);
    if (fg_px.empty() || bg_px.empty()) {
        log::warn("grabcut: no foreground or background samples, returning the foreground unchanged");
        return fg_mask(trimap);
    }
    GmmParams gp;
    gp.k = params.gmm_k;
    gp.max_iters = params.init_em_iters;
    gp.seed = params.seed;
    GmmModel fg_model = fit_gmm(fg_px, gp);
    gp.seed = params.seed + 1;
    GmmModel bg_model = fit_gmm(bg_px, gp);

    // Smoothness weights are fixed across iterations.
    double sum_sq = 0;
    std::size_t n_pairs = 0;
    for (int y = 0; y < rh; ++y)
        for (int x = 0; x < rw; ++x)
            for (const auto& d : kNeighbours) {
                const int nx = x + d[0], ny = y + d[1];
                if (nx < 0 || nx >= rw || ny >= rh) continue;
                sum_sq += (z[static_cast<std::size_t>(y) * rw + x] - z[static_cast<std::size_t>(ny) * rw + nx]).squaredNorm();
                ++n_pairs;
            }
    const double mean_sq = n_pairs ? sum_sq / static_cast<double>(n_pairs) : 0.0;
    const double beta = mean_sq > 0 ? 1.0 / (2.0 * mean_sq) : 0.0;
    const double lambda = 9.0 * params.gamma;

    for (int iter = 0; iter < params.n_iters; ++iter) {
        std::vector<std::size_t> fi, bi;
        split(fg_px, bg_px, &fi, &bi);
        if (fg_px.empty() || bg_px.empty()) break;
        std::vector<std::size_t> fa(fg_px.size()), ba(bg_px.size());
        for (std::size_t j = 0; j < fg_px.size(); ++j) fa[j] = fg_model.most_likely_component(fg_px[j]);
        for (std::size_t j = 0; j < bg_px.size(); ++j) ba[j] = bg_model.most_likely_component(bg_px[j]);
        fg_model = learn_gmm(fg_px, fa, fg_model.size());
        bg_model = learn_gmm(bg_px, ba, bg_model.size());

        FlowGraph g(static_cast<int>(n));
        for (std::size_t i = 0; i < n; ++i) {
            double to_fg = 0, to_bg = 0;  // source = foreground
            switch (lab[i]) {
                case TrimapLabel::SureFg: to_fg = lambda; break;
                case TrimapLabel::SureBg: to_bg = lambda; break;
                default: {
                    const double c_fg = -fg_model.log_density(z[i]);
                    const double c_bg = -bg_model.log_density(z[i]);
                    // Labelling p as FG costs c_fg, i.e. cutting its sink link.
                    const double lo = std::min(c_fg, c_bg);
                    to_fg = c_bg - lo;
                    to_bg = c_fg - lo;
                }
            }
            g.add_terminal_weights(static_cast<int>(i), to_fg, to_bg);
        }
        for (int y = 0; y < rh; ++y)
            for (int x = 0; x < rw; ++x)
                for (const auto& d : kNeighbours) {
                    const int nx = x + d[0], ny = y + d[1];
                    if (nx < 0 || nx >= rw || ny >= rh) continue;
                    const std::size_t p = static_cast<std::size_t>(y) * rw + x;
                    const std::size_t q = static_cast<std::size_t>(ny) * rw + nx;
                    double w = params.gamma * std::exp(-beta * (z[p] - z[q]).squaredNorm());
                    if (d[0] != 0 && d[1] != 0) w /= std::sqrt(2.0);
                    g.add_edge(static_cast<int>(p), static_cast<int>(q), w, w);
                }
        g.max_flow();
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_prob(lab[i])) continue;
            const TrimapLabel nl = g.in_source_segment(static_cast<int>(i)) ? TrimapLabel::ProbFg : TrimapLabel::ProbBg;
            changed = changed || nl != lab[i];
            lab[i] = nl;
        }
        log::debug("grabcut: iteration " + std::to_string(iter) + (changed ? " changed labels" : " converged"));
    }

    PixelImage out = make_mask(image.size());
    for (int y = 0; y < trimap.height; ++y)
        for (int x = 0; x < trimap.width; ++x)
            if (trimap.at(x, y) == TrimapLabel::SureFg) out.at(x, y) = 255;
    for (int y = 0; y < rh; ++y)
        for (int x = 0; x < rw; ++x)
            if (is_fg(lab[static_cast<std::size_t>(y) * rw + x])) out.at(x0 + x, y0 + y) = 255;
    return out;
}

PixelImage refine_grabcut(const PixelImage& image, const PixelImage& mask, const BBox& ref_bbox,
                          const GrabCutParams& params) {
    require_mask(mask, "refine_grabcut");
    if (image.size() != mask.size())
        throw Error("refine_grabcut: image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                    " but mask is " + std::to_string(mask.width()) + "x" + std::to_string(mask.height()));
    const Trimap t = build_trimap(mask, trimap_band(ref_bbox, params.alpha, params.max_band));
    if (t.count(TrimapLabel::ProbFg) + t.count(TrimapLabel::ProbBg) == 0) {
        log::warn("refine_grabcut: degenerate trimap (no probable pixels), mask returned unchanged");
        return mask;
    }
    if (t.count(TrimapLabel::SureFg) + t.count(TrimapLabel::ProbFg) == 0) {
        log::warn("refine_grabcut: empty mask, returned unchanged");
        return mask;
    }
    return grabcut(image, t, params);
}

PixelImage grabcut_from_bbox(const PixelImage& image, const BBox& bbox, const GrabCutParams& params) {
    const PixelRect rect = pixel_rect(bbox, image.size());
    PixelImage box_mask = make_mask(image.size());
    for (int y = rect.y0; y < rect.y1; ++y)
        for (int x = rect.x0; x < rect.x1; ++x) box_mask.at(x, y) = 255;
    if (rect.empty()) {
        log::warn("grabcut_from_bbox: box does not cover any pixel");
        return box_mask;
    }
    const int r = trimap_band(bbox, params.alpha, params.max_band);
    const PixelImage interior = erode(box_mask, StructuringElement::disk(1), r);
    Trimap t{image.width(), image.height(), std::vector<TrimapLabel>(image.pixel_count(), TrimapLabel::SureBg)};
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
        if (interior.data()[i])
            t.labels[i] = TrimapLabel::ProbFg;
        else if (box_mask.data()[i])
            t.labels[i] = TrimapLabel::ProbBg;
    }
    return grabcut(image, t, params);
}

}  // namespace plg
