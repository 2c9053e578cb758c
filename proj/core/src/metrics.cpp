#include "plg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "plg/assignment.hpp"
#include "plg/error.hpp"

namespace plg {

namespace {

struct FrameBox {
    int id;
    BBox box;
};

using FrameIndex = std::map<int, std::vector<FrameBox>>;

FrameIndex index_by_frame(std::span<const Track> tracks, bool detected_only) {
    FrameIndex idx;
    std::set<int> ids;
    for (const auto& t : tracks) {
        if (!ids.insert(t.id).second) throw Error("duplicate track id " + std::to_string(t.id));
        for (const auto& o : t.observations) {
            if (detected_only && o.source != ObsSource::Detected) continue;
            idx[o.frame].push_back({t.id, o.bbox});
        }
    }
    return idx;
}

bool geometric_less(const FrameBox& a, const FrameBox& b) {
    return std::tie(a.box.x, a.box.y, a.box.w, a.box.h) < std::tie(b.box.x, b.box.y, b.box.w, b.box.h);
}

}  // namespace

MatchLog match_frames(std::span<const Track> gt, std::span<const Track> hyp, const MatchParams& params) {
    const FrameIndex gidx = index_by_frame(gt, false);
    FrameIndex hidx = index_by_frame(hyp, params.detected_only);
    std::set<int> frames;
    for (const auto& [f, _] : gidx) frames.insert(f);
    for (const auto& [f, _] : hidx) frames.insert(f);

    MatchLog log;
    std::map<int, int> prev;       // gt id -> hyp id matched in the previous frame
    std::map<int, int> last_seen;  // gt id -> last hyp id it was ever matched to
    static const std::vector<FrameBox> kNone;
    for (const int f : frames) {
        const auto git = gidx.find(f);
        const auto& g = git == gidx.end() ? kNone : git->second;
        std::vector<FrameBox> h;
        if (const auto hit = hidx.find(f); hit != hidx.end()) h = hit->second;
        std::stable_sort(h.begin(), h.end(), geometric_less);

        FrameRecord rec;
        rec.frame = f;
        rec.n_gt = static_cast<int>(g.size());
        rec.n_hyp = static_cast<int>(h.size());
        std::vector<char> g_used(g.size(), 0), h_used(h.size(), 0);

        if (params.continuity) {
            for (std::size_t gi = 0; gi < g.size(); ++gi) {
                const auto p = prev.find(g[gi].id);
                if (p == prev.end()) continue;
                for (std::size_t hi = 0; hi < h.size(); ++hi) {
                    if (h_used[hi] || h[hi].id != p->second) continue;
                    const double o = iou(g[gi].box, h[hi].box);
                    if (o >= params.iou_gate) {
                        g_used[gi] = h_used[hi] = 1;
                        rec.matches.push_back({g[gi].id, h[hi].id, o});
                    }
                    break;
                }
            }
        }

        std::vector<std::size_t> gi_free, hi_free;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!g_used[i]) gi_free.push_back(i);
        for (std::size_t i = 0; i < h.size(); ++i)
            if (!h_used[i]) hi_free.push_back(i);
        if (!gi_free.empty() && !hi_free.empty()) {
            constexpr double kRejected = 1e6;
            Eigen::MatrixXd cost(static_cast<Eigen::Index>(gi_free.size()), static_cast<Eigen::Index>(hi_free.size()));
            for (std::size_t a = 0; a < gi_free.size(); ++a)
                for (std::size_t b = 0; b < hi_free.size(); ++b) {
                    const double o = iou(g[gi_free[a]].box, h[hi_free[b]].box);
                    cost(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                        o >= params.iou_gate ? 1.0 - o : kRejected;
                }
            for (const auto& [a, b] : hungarian_assign(cost).pairs) {
                if (cost(a, b) >= kRejected) continue;
                const FrameBox& gb = g[gi_free[static_cast<std::size_t>(a)]];
                const FrameBox& hb = h[hi_free[static_cast<std::size_t>(b)]];
                rec.matches.push_back({gb.id, hb.id, 1.0 - cost(a, b)});
            }
        }
        std::sort(rec.matches.begin(), rec.matches.end(),
                  [](const FrameMatch& a, const FrameMatch& b) { return a.gt_id < b.gt_id; });

        prev.clear();
        for (const auto& m : rec.matches) {
            const auto ls = last_seen.find(m.gt_id);
            if (ls != last_seen.end() && ls->second != m.hyp_id) rec.switched_gt.push_back(m.gt_id);
            last_seen[m.gt_id] = m.hyp_id;
            prev[m.gt_id] = m.hyp_id;
        }
        log.frames.push_back(std::move(rec));
    }
    return log;
}

double compute_mota(long fn, long fp, long id_sw, long gt_dets) {
    if (gt_dets <= 0) throw Error("MOTA undefined: no ground-truth boxes");
    return 1.0 - static_cast<double>(fn + fp + id_sw) / static_cast<double>(gt_dets);
}

std::optional<double> compute_motp(const MatchLog& log) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& fr : log.frames)
        for (const auto& m : fr.matches) {
            sum += m.iou;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

TrackQuality mt_ml_fm(std::span<const Track> gt, const MatchLog& log, double mt_ratio, double ml_ratio) {
    std::map<int, std::set<int>> matched;  // gt id -> frames with a match
    for (const auto& fr : log.frames)
        for (const auto& m : fr.matches) matched[m.gt_id].insert(fr.frame);
    TrackQuality q;
    for (const auto& t : gt) {
        if (t.observations.empty()) continue;
        const auto it = matched.find(t.id);
        std::size_t hits = 0;
        bool was_matched = false, gap = false;
        for (const auto& o : t.observations) {
            const bool m = it != matched.end() && it->second.count(o.frame) > 0;
            if (m) {
                ++hits;
                if (gap) ++q.fm;
                gap = false;
                was_matched = true;
            } else if (was_matched) {
                gap = true;
            }
        }
        const double cov = static_cast<double>(hits) / static_cast<double>(t.observations.size());
        if (cov >= mt_ratio) ++q.mt;
        if (cov <= ml_ratio) ++q.ml;
    }
    return q;
}

double yield_error_exact(long ids, long gt_ids) {
    if (gt_ids <= 0) throw Error("yield error undefined: no ground-truth instances");
    return 100.0 * static_cast<double>(std::labs(ids - gt_ids)) / static_cast<double>(gt_ids);
}

long yield_error(long ids, long gt_ids) { return std::lround(yield_error_exact(ids, gt_ids)); }

MotReport evaluate(std::span<const Track> gt, std::span<const Track> hyp, const MatchParams& params) {
    const MatchLog log = match_frames(gt, hyp, params);
    MotReport r;
    for (const auto& fr : log.frames) {
        const long m = static_cast<long>(fr.matches.size());
        r.tp += m;
        r.fn += fr.n_gt - m;
        r.fp += fr.n_hyp - m;
        r.id_sw += static_cast<long>(fr.switched_gt.size());
        r.gt_dets += fr.n_gt;
        r.dets += fr.n_hyp;
    }
    if (r.tp + r.fn != r.gt_dets || r.tp + r.fp != r.dets) throw Error("evaluation accounting identities violated");
    r.mota = compute_mota(r.fn, r.fp, r.id_sw, r.gt_dets);
    r.motp = compute_motp(log);
    const TrackQuality q = mt_ml_fm(gt, log);
    r.mt = q.mt;
    r.ml = q.ml;
    r.fm = q.fm;
    r.precision = r.dets > 0 ? static_cast<double>(r.tp) / static_cast<double>(r.dets) : 0.0;
    r.recall = static_cast<double>(r.tp) / static_cast<double>(r.gt_dets);
    r.gt_ids = static_cast<long>(gt.size());
    for (const auto& t : hyp) {
        const bool counted = !params.detected_only || t.detected_count() > 0;
        if (counted && !t.observations.empty()) ++r.ids;
    }
    r.yield_err = yield_error(r.ids, r.gt_ids);
    return r;
}

std::string report_to_json(const MotReport& r) {
    nlohmann::ordered_json j;
    j["MOTA"] = r.mota;
    j["MOTP"] = r.motp ? nlohmann::ordered_json(*r.motp) : nlohmann::ordered_json(nullptr);
    j["TP"] = r.tp;
    j["FP"] = r.fp;
    j["FN"] = r.fn;
    j["ID_sw"] = r.id_sw;
    j["FM"] = r.fm;
    j["MT"] = r.mt;
    j["ML"] = r.ml;
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["Dets"] = r.dets;
    j["GT_Dets"] = r.gt_dets;
    j["IDs"] = r.ids;
    j["GT_IDs"] = r.gt_ids;
    j["yield_err"] = r.yield_err;
    return j.dump(2) + "\n";
}

std::string report_csv_header() {
    return "label,MOTA,MOTP,TP,FP,FN,ID_sw,FM,MT,ML,precision,recall,Dets,GT_Dets,IDs,GT_IDs,yield_err\n";
}

std::string report_csv_row(const MotReport& r, std::string_view label) {
    std::ostringstream os;
    os.precision(6);
    os << label << ',' << r.mota << ',';
    if (r.motp) os << *r.motp;
    os << ',' << r.tp << ',' << r.fp << ',' << r.fn << ',' << r.id_sw << ',' << r.fm << ',' << r.mt << ',' << r.ml
       << ',' << r.precision << ',' << r.recall << ',' << r.dets << ',' << r.gt_dets << ',' << r.ids << ','
       << r.gt_ids << ',' << r.yield_err << '\n';
    return os.str();
}

}  // namespace plg
