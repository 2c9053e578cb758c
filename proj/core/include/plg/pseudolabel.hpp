#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plg/consistency.hpp"
#include "plg/detection.hpp"

namespace plg {

/// Equally spaced keyframes starting at frame 0.
struct KeyframeSchedule {
    int n_frames = 0;
    int skip = 1;
    std::vector<int> keyframes;

    bool is_keyframe(int frame) const noexcept { return frame % skip == 0; }
    int source_keyframe(int frame) const noexcept { return frame - frame % skip; }
    double labelled_fraction() const noexcept {
        return n_frames ? static_cast<double>(keyframes.size()) / n_frames : 0.0;
    }
};

KeyframeSchedule schedule_keyframes(int n_frames, int skip);

/// Detections with confidence >= tau, order preserved.
std::vector<Detection> filter_confident(std::span<const Detection> dets, double tau);

enum class CentroidRule {
    /// Box center moves by the displacement of the feature centroid. Equal to
    /// Absolute when the source features are centred in the box, and leaves
    /// the box in place for a static scene.
    Displacement,
    /// Box center is placed on the centroid of the matched features in the
    /// target frame.
    Absolute,
};

struct TransferParams {
    int min_features = 3;
    CentroidRule rule = CentroidRule::Displacement;
};

struct TransferredBox {
    BBox box;           ///< clamped to the image
    BBox unclamped;     ///< same size as the source box
    bool truncated = false;
    int n_features = 0;
};

/// Moves a box from frame i to frame i+n keeping its size. Only matches whose
/// frame-i point lies inside the box are used; fewer than min_features of them
/// (or a result entirely outside the image) means the box is lost.
std::optional<TransferredBox> transfer_bbox(const BBox& box, std::span<const Correspondence> matches,
                                            ImageSize target_size, const TransferParams& params = {});

enum class Provenance { KeyframeDetection, Interpolated };

struct PseudoLabel {
    Detection det;
    Provenance provenance = Provenance::KeyframeDetection;
    int source_frame = 0;   ///< keyframe the box originates from
    int source_index = 0;   ///< index among that keyframe's confident detections
    bool truncated = false;
    int n_features = 0;
};

struct PseudoLabelSet {
    int skip = 1;
    std::vector<std::vector<PseudoLabel>> frames;  ///< indexed by frame position
    std::vector<std::string> failures;             ///< frame pairs that failed verification

    std::vector<Detection> detections(std::size_t frame) const;
    std::size_t count(Provenance p) const noexcept;
};

struct PlgParams {
    int skip = 2;
    double tau = 0.5;
    TransferParams transfer;
    GeometryConfig geometry;
    bool dedup = false;  ///< drop interpolated boxes overlapping a kept box above dedup_iou
    double dedup_iou = 0.9;
};

/// Dense pseudo-labels from keyframe detections. `features[f]` are the
/// features of frame f; `keyframe_dets[f]` is read only for keyframes.
/// Keyframe boxes are copied; frames k+1 .. k+skip-1 receive boxes moved from
/// keyframe k through verified matches k -> f. A pair that fails verification
/// is recorded in `failures` and contributes no boxes.
PseudoLabelSet generate_pseudolabels(std::span<const FeatureSet> features,
                                     std::span<const std::vector<Detection>> keyframe_dets,
                                     const PlgParams& params);

/// Writes labels/<stem>.txt per frame (YOLO) and the provenance sidecar JSON.
void write_pseudolabels(const std::filesystem::path& label_dir, const std::filesystem::path& provenance_json,
                        const PseudoLabelSet& set, std::span<const std::string> frame_stems, ImageSize size);

const char* to_string(Provenance p) noexcept;

}  // namespace plg
