#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plg/tracking.hpp"

namespace plg {

struct MatchParams {
    double iou_gate = 0.5;
    bool continuity = true;     ///< keep last frame's pairs while IoU >= gate
    bool detected_only = true;  ///< ignore predicted observations of hypotheses
};

struct FrameMatch {
    int gt_id = 0;
    int hyp_id = 0;
    double iou = 0;
};

struct FrameRecord {
    int frame = 0;
    int n_gt = 0;
    int n_hyp = 0;
    std::vector<FrameMatch> matches;
    std::vector<int> switched_gt;  ///< GT ids whose hypothesis changed in this frame
};

struct MatchLog {
    std::vector<FrameRecord> frames;  ///< every frame with a GT or hypothesis box, ascending
};

/// CLEAR correspondence search. Per frame, pairs from the previous frame
/// are kept while still above the gate, the rest are matched by Hungarian
/// assignment on 1 - IoU and gated. An ID switch is logged when a GT
/// object's match differs from the last hypothesis it was matched to.
/// Hypotheses are ordered by geometry, so relabelling them changes nothing.
MatchLog match_frames(std::span<const Track> gt, std::span<const Track> hyp, const MatchParams& params = {});

/// 1 - (fn + fp + id_sw) / gt_dets; throws when gt_dets == 0.
double compute_mota(long fn, long fp, long id_sw, long gt_dets);

/// Mean IoU over all matched pairs; empty when there are none.
std::optional<double> compute_motp(const MatchLog& log);

struct TrackQuality {
    int mt = 0;
    int ml = 0;
    int fm = 0;
};

/// Coverage >= mt_ratio counts as mostly tracked, <= ml_ratio as mostly lost;
/// each matched -> unmatched -> matched pattern is one fragmentation.
TrackQuality mt_ml_fm(std::span<const Track> gt, const MatchLog& log, double mt_ratio = 0.8, double ml_ratio = 0.2);

/// 100 |ids - gt_ids| / gt_ids. Throws when gt_ids == 0.
double yield_error_exact(long ids, long gt_ids);
/// Rounded to the nearest integer percent.
long yield_error(long ids, long gt_ids);

struct MotReport {
    double mota = 0;
    std::optional<double> motp;
    long tp = 0, fp = 0, fn = 0;
    long id_sw = 0;
    long fm = 0;
    long mt = 0, ml = 0;
    double precision = 0, recall = 0;
    long dets = 0, gt_dets = 0;
    long ids = 0, gt_ids = 0;
    long yield_err = 0;
};

/// Runs match_frames and fills every metric. Accounting identities
/// (TP + FN = GT_Dets, TP + FP = Dets) are checked and violations throw.
MotReport evaluate(std::span<const Track> gt, std::span<const Track> hyp, const MatchParams& params = {});

std::string report_to_json(const MotReport& r);
std::string report_csv_header();
std::string report_csv_row(const MotReport& r, std::string_view label);

}  // namespace plg
