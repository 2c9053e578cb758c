#pragma once

#include <cstdint>
#include <vector>

#include "plg/image.hpp"
#include "plg/morphology.hpp"
#include "plg/superpixel.hpp"

namespace plg {

/// Grows `mask` by repeated dilation with `elem`, clipping to the pixels of
/// `ref_bbox` after every step, until the mask touches all four sides of the
/// box or stops changing. Pixels outside the box are dropped. An empty input
/// (or one with no pixel inside the box) is returned unchanged with a warning.
PixelImage refine_dilation(const PixelImage& mask, const BBox& ref_bbox,
                           const StructuringElement& elem = StructuringElement::disk(2));

struct SlicVoteParams {
    double upper = 0.70;
    double lower = 0.30;
};

/// Per-superpixel vote: coverage >= upper sets the whole segment, coverage
/// <= lower clears it, anything in between is left as is.
PixelImage refine_slic(const PixelImage& mask, const SuperpixelMap& superpixels,
                       const SlicVoteParams& params = {});

enum class TrimapLabel : std::uint8_t { SureBg = 0, ProbBg = 1, ProbFg = 2, SureFg = 3 };

struct Trimap {
    int width = 0;
    int height = 0;
    std::vector<TrimapLabel> labels;

    TrimapLabel at(int x, int y) const noexcept { return labels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count(TrimapLabel l) const noexcept;
};

/// r = max(1, round(alpha * min(w, h))), capped at `max_band`.
int trimap_band(const BBox& ref_bbox, double alpha, int max_band = 15);

/// SURE_FG = erode(mask, r), PROB_FG = mask \ SURE_FG,
/// PROB_BG = dilate(mask, r) \ mask, SURE_BG = rest (unit-disk iterations).
Trimap build_trimap(const PixelImage& mask, int r);

struct GrabCutParams {
    double alpha = 0.05;
    int max_band = 15;
    int n_iters = 5;
    double gamma = 50.0;
    int gmm_k = 5;
    int init_em_iters = 10;
    std::uint64_t seed = 0;
};

/// Iterated graph cut over a trimap. Returns the foreground mask
/// (SURE_FG and PROB pixels labelled foreground by the final cut).
/// The optimization runs on the bounding rectangle of the non-SURE_BG
/// pixels plus a margin; SURE_BG pixels outside it stay background.
PixelImage grabcut(const PixelImage& image, const Trimap& trimap, const GrabCutParams& params);

/// Trimap from the coarse mask, band width from the reference box. Degenerate
/// trimaps return the input with a warning. May grow outside `ref_bbox`.
PixelImage refine_grabcut(const PixelImage& image, const PixelImage& mask, const BBox& ref_bbox,
                          const GrabCutParams& params = {});

/// Experimental initial-mask generator: outside the box is SURE_BG, the
/// box eroded by the band is PROB_FG and the rim is PROB_BG.
PixelImage grabcut_from_bbox(const PixelImage& image, const BBox& bbox, const GrabCutParams& params = {});

}  // namespace plg
