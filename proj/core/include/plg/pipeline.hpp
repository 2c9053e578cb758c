#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "plg/config.hpp"
#include "plg/imageio.hpp"
#include "plg/metrics.hpp"
#include "plg/pseudolabel.hpp"
#include "plg/refine.hpp"
#include "plg/tracking.hpp"

namespace plg {

const char* version() noexcept;

enum class RefineMethod { None, Dilation, Slic, GrabCut };
RefineMethod parse_refine_method(std::string_view s);

/// Every tunable of the end-to-end run, read from an INI config.
struct PipelineConfig {
    std::uint64_t seed = 0;
    int jobs = 1;
    int max_keypoints = 1000;
    PlgParams plg;
    std::string tracker = "sfm";
    SfmTrackerParams sfm;
    KalmanTrackerParams kalman;
    RefineMethod refine = RefineMethod::None;
    SlicParams slic;
    SlicVoteParams vote;
    GrabCutParams grabcut;
    MatchParams eval;

    /// Keys: plg.skip, plg.tau, plg.dedup, plg.dedup_iou, plg.min_features,
    /// features.max_keypoints, match.max_dist, ransac.threshold_px,
    /// ransac.max_iters, ransac.seed, ransac.confidence, ransac.per_box, track.tracker,
    /// track.v_min, track.max_miss, track.n_init, track.iou_min,
    /// track.appearance, refine.method, slic.k, slic.m, slic.tu, slic.tl,
    /// grabcut.alpha, grabcut.iters, grabcut.gamma, eval.iou_gate.
    static PipelineConfig from(const Config& cfg, std::uint64_t seed, int jobs);
};

struct PipelineInputs {
    std::vector<PixelImage> frames;
    std::vector<std::string> stems;                ///< output file stem per frame
    std::vector<std::vector<Detection>> detections;  ///< per frame; only keyframes are read
    std::optional<std::vector<Track>> gt_tracks;     ///< enables the eval stage
    std::optional<MaskDataset> masks;                ///< enables the refine stage
};

struct StageTiming {
    std::string name;
    double seconds = 0;
};

struct PipelineResult {
    PseudoLabelSet labels;
    std::vector<Track> tracks;
    std::optional<MaskDataset> refined;
    std::optional<MotReport> report;
    std::vector<StageTiming> timings;
};

/// features -> box pseudo-labels -> (refine) -> track -> (eval), writing
/// frames/, labels/, provenance.json, masks/, tracks.json, report.json and
/// manifest.json under `run_dir`. A failing stage throws StageError after a
/// manifest of the completed stages has been written.
PipelineResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg, const Config& raw_config,
                            const std::filesystem::path& run_dir);

/// Refines every instance whose image is in `images` (keyed by image id).
MaskDataset refine_masks(const MaskDataset& masks, const std::vector<std::pair<std::string, PixelImage>>& images,
                         const PipelineConfig& cfg);

/// SHA-256 over the canonical config text and the seed.
std::string config_hash(const Config& cfg, std::uint64_t seed);

}  // namespace plg
