#include "plg/pseudolabel.hpp"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "plg/error.hpp"
#include "plg/imageio.hpp"
#include "plg/log.hpp"

namespace plg {

KeyframeSchedule schedule_keyframes(int n_frames, int skip) {
    if (skip < 1) throw Error("skip must be >= 1, got " + std::to_string(skip));
    if (n_frames < 1) throw Error("schedule needs at least one frame");
    KeyframeSchedule s;
    s.n_frames = n_frames;
    s.skip = skip;
    for (int k = 0; k < n_frames; k += skip) s.keyframes.push_back(k);
    return s;
}

std::vector<Detection> filter_confident(std::span<const Detection> dets, double tau) {
    std::vector<Detection> out;
    std::copy_if(dets.begin(), dets.end(), std::back_inserter(out),
                 [tau](const Detection& d) { return d.confidence >= tau; });
    return out;
}

std::optional<TransferredBox> transfer_bbox(const BBox& box, std::span<const Correspondence> matches,
                                            ImageSize target_size, const TransferParams& params) {
    double sx = 0, sy = 0, dx = 0, dy = 0;
    int n = 0;
    for (const auto& c : matches) {
        if (!box.contains(c.src.x, c.src.y)) continue;
        sx += c.src.x;
        sy += c.src.y;
        dx += c.dst.x;
        dy += c.dst.y;
        ++n;
    }
    if (n < std::max(params.min_features, 1)) return std::nullopt;
    const double inv = 1.0 / n;
    double cx = dx * inv, cy = dy * inv;
    if (params.rule == CentroidRule::Displacement) {
        cx = box.cx() + (dx - sx) * inv;
        cy = box.cy() + (dy - sy) * inv;
    }
    TransferredBox out;
    out.unclamped = BBox::from_center(cx, cy, box.w, box.h);
    out.n_features = n;
    const ClampResult c = clamp_box(out.unclamped, target_size);
    if (!c.valid) return std::nullopt;
    out.box = c.box;
    out.truncated = c.truncated;
    return out;
}

std::vector<Detection> PseudoLabelSet::detections(std::size_t frame) const {
    std::vector<Detection> out;
    if (frame >= frames.size()) return out;
    out.reserve(frames[frame].size());
    for (const auto& p : frames[frame]) out.push_back(p.det);
    return out;
}

std::size_t PseudoLabelSet::count(Provenance p) const noexcept {
    std::size_t n = 0;
    for (const auto& f : frames)
        for (const auto& l : f) n += l.provenance == p;
    return n;
}

const char* to_string(Provenance p) noexcept {
    return p == Provenance::KeyframeDetection ? "keyframe_detection" : "interpolated";
}

namespace {

void dedup_frame(std::vector<PseudoLabel>& labels, double max_iou) {
    std::vector<std::size_t> order(labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool ka = labels[a].provenance == Provenance::KeyframeDetection;
        const bool kb = labels[b].provenance == Provenance::KeyframeDetection;
        if (ka != kb) return ka;
        return labels[a].det.confidence > labels[b].det.confidence;
    });
    std::vector<bool> keep(labels.size(), false);
    std::vector<std::size_t> kept;
    for (auto i : order) {
        bool suppressed = false;
        if (labels[i].provenance == Provenance::Interpolated)
            for (auto j : kept)
                if (iou(labels[i].det.bbox, labels[j].det.bbox) > max_iou) {
                    suppressed = true;
                    break;
                }
        if (!suppressed) {
            keep[i] = true;
            kept.push_back(i);
        }
    }
    std::vector<PseudoLabel> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (keep[i]) out.push_back(labels[i]);
    labels = std::move(out);
}

}  // namespace

PseudoLabelSet generate_pseudolabels(std::span<const FeatureSet> features,
                                     std::span<const std::vector<Detection>> keyframe_dets,
                                     const PlgParams& params) {
    const int n = static_cast<int>(features.size());
    PseudoLabelSet out;
    out.skip = params.skip;
    out.frames.resize(features.size());
    if (n == 0) return out;
    const KeyframeSchedule schedule = schedule_keyframes(n, params.skip);

    for (int k : schedule.keyframes) {
        std::vector<Detection> confident;
        if (static_cast<std::size_t>(k) < keyframe_dets.size())
            confident = filter_confident(keyframe_dets[static_cast<std::size_t>(k)], params.tau);
        for (std::size_t i = 0; i < confident.size(); ++i) {
            PseudoLabel p;
            p.det = confident[i];
            p.det.frame_index = k;
            p.provenance = Provenance::KeyframeDetection;
            p.source_frame = k;
            p.source_index = static_cast<int>(i);
            out.frames[static_cast<std::size_t>(k)].push_back(p);
        }
        if (confident.empty()) continue;

        const FeatureSet& fk = features[static_cast<std::size_t>(k)];
        for (int f = k + 1; f < std::min(k + params.skip, n); ++f) {
            const FeatureSet& ff = features[static_cast<std::size_t>(f)];
            const VerifiedPair pair = verify_frame_pair(fk, ff, params.geometry);
            if (!pair.ransac && !params.geometry.per_box_ransac) {
                const std::string msg = "frames " + std::to_string(k) + "->" + std::to_string(f) +
                                        ": no consensus (" + std::to_string(pair.raw.size()) + " matches)";
                log::info("pseudo-labels skipped, " + msg);
                out.failures.push_back(msg);
                continue;
            }
            for (std::size_t i = 0; i < confident.size(); ++i) {
                const auto corr = box_correspondences(pair, confident[i].bbox, params.geometry);
                auto moved = transfer_bbox(confident[i].bbox, corr, ff.size, params.transfer);
                if (!moved) continue;
                PseudoLabel p;
                p.det = confident[i];
                p.det.frame_index = f;
                p.det.bbox = moved->box;
                p.provenance = Provenance::Interpolated;
                p.source_frame = k;
                p.source_index = static_cast<int>(i);
                p.truncated = moved->truncated;
                p.n_features = moved->n_features;
                out.frames[static_cast<std::size_t>(f)].push_back(p);
            }
        }
    }
    if (params.dedup)
        for (auto& f : out.frames) dedup_frame(f, params.dedup_iou);
    return out;
}

void write_pseudolabels(const std::filesystem::path& label_dir, const std::filesystem::path& provenance_json,
                        const PseudoLabelSet& set, std::span<const std::string> frame_stems, ImageSize size) {
    if (frame_stems.size() != set.frames.size())
        throw Error("write_pseudolabels: " + std::to_string(frame_stems.size()) + " frame names for " +
                    std::to_string(set.frames.size()) + " frames");
    nlohmann::json j;
    j["skip"] = set.skip;
    j["failures"] = set.failures;
    j["frames"] = nlohmann::json::array();
    for (std::size_t f = 0; f < set.frames.size(); ++f) {
        const std::string file = frame_stems[f] + ".txt";
        write_yolo_labels(label_dir / file, set.detections(f), size);
        nlohmann::json boxes = nlohmann::json::array();
        for (const auto& p : set.frames[f])
            boxes.push_back({{"provenance", to_string(p.provenance)},
                             {"source_frame", p.source_frame},
                             {"source_index", p.source_index},
                             {"truncated", p.truncated},
                             {"n_features", p.n_features}});
        j["frames"].push_back({{"frame", f}, {"file", file}, {"boxes", std::move(boxes)}});
    }
    write_text_file(provenance_json, j.dump(2) + "\n");
}

}  // namespace plg
