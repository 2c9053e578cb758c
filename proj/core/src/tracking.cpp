#include "plg/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "plg/assignment.hpp"
#include "plg/error.hpp"
#include "plg/imageio.hpp"
#include "plg/kalman.hpp"
#include "plg/log.hpp"

namespace plg {

std::size_t Track::detected_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(observations.begin(), observations.end(),
                                                  [](const Observation& o) { return o.source == ObsSource::Detected; }));
}

const char* to_string(ObsSource s) noexcept { return s == ObsSource::Detected ? "detected" : "predicted"; }

namespace {

// Predictions after the last detection carry no evidence.
void trim_trailing_predictions(Track& t) {
    while (!t.observations.empty() && t.observations.back().source == ObsSource::Predicted) t.observations.pop_back();
}

std::size_t count_inside(std::span<const Correspondence> corr, const BBox& box) {
    return static_cast<std::size_t>(std::count_if(corr.begin(), corr.end(), [&](const Correspondence& c) {
        return box.contains(c.dst.x, c.dst.y);
    }));
}

}  // namespace

std::vector<Track> track_sfm(std::span<const FeatureSet> features, std::span<const std::vector<Detection>> dets,
                             const GeometryConfig& geometry, const SfmTrackerParams& params) {
    if (features.size() != dets.size()) throw Error("track_sfm: features and detections cover different frame counts");
    std::vector<Track> done;
    std::vector<Track> alive;
    int next_id = 1;
    auto spawn = [&](int frame, const BBox& b) {
        Track t;
        t.id = next_id++;
        t.observations.push_back({frame, b, ObsSource::Detected});
        alive.push_back(std::move(t));
    };

    for (std::size_t f = 0; f < dets.size(); ++f) {
        const int frame = static_cast<int>(f);
        const auto& fd = dets[f];
        if (f == 0 || alive.empty()) {
            for (const auto& d : fd) spawn(frame, d.bbox);
            continue;
        }
        const VerifiedPair pair = verify_frame_pair(features[f - 1], features[f], geometry);
        if (!pair.ransac) log::info("track_sfm: frame " + std::to_string(f) + " has no verified matches, using IoU association");

        struct Candidate {
            int tier;  // 0: votes (or IoU for tracks without matches), 1: IoU after a failed vote
            double score;
            std::size_t votes;
            std::size_t track;
            std::size_t det;
        };
        std::vector<Candidate> cands;
        std::vector<std::vector<Correspondence>> track_corr(alive.size());
        for (std::size_t ti = 0; ti < alive.size(); ++ti) {
            const BBox& last = alive[ti].observations.back().bbox;
            if (pair.ransac) track_corr[ti] = box_correspondences(pair, last, geometry);
            const auto& corr = track_corr[ti];
            const bool voting = corr.size() >= static_cast<std::size_t>(std::max(1, params.min_votes));
            for (std::size_t di = 0; di < fd.size(); ++di) {
                if (voting) {
                    const std::size_t v = count_inside(corr, fd[di].bbox);
                    const double frac = static_cast<double>(v) / static_cast<double>(corr.size());
                    if (frac >= params.v_min) {
                        cands.push_back({0, frac, v, ti, di});
                        continue;
                    }
                }
                const double o = iou(last, fd[di].bbox);
                if (o >= params.fallback_iou) cands.push_back({voting ? 1 : 0, o, 0, ti, di});
            }
        }
        std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
            if (a.tier != b.tier) return a.tier < b.tier;
            if (a.score != b.score) return a.score > b.score;
            if (a.votes != b.votes) return a.votes > b.votes;
            if (alive[a.track].id != alive[b.track].id) return alive[a.track].id < alive[b.track].id;
            return a.det < b.det;
        });
        std::vector<char> t_used(alive.size(), 0), d_used(fd.size(), 0);
        for (const auto& c : cands) {
            if (t_used[c.track] || d_used[c.det]) continue;
            t_used[c.track] = d_used[c.det] = 1;
            Track& t = alive[c.track];
            t.observations.push_back({frame, fd[c.det].bbox, ObsSource::Detected});
            t.miss_count = 0;
            t.state = TrackState::Active;
        }

        std::vector<Track> still;
        for (std::size_t ti = 0; ti < alive.size(); ++ti) {
            Track& t = alive[ti];
            if (!t_used[ti]) {
                ++t.miss_count;
                t.state = TrackState::Lost;
                std::optional<BBox> moved;
                if (t.miss_count <= params.max_miss) {
                    const BBox& last = t.observations.back().bbox;
                    const ImageSize sz = features[f].size;
                    if (auto tb = transfer_bbox(last, track_corr[ti], sz, params.transfer)) {
                        moved = tb->box;
                    } else if (pair.ransac) {
                        try {
                            const Point2 c = warp_point(pair.ransac->model, Point2{last.cx(), last.cy()});
                            const auto cl = clamp_box(BBox::from_center(c.x, c.y, last.w, last.h), sz);
                            if (cl.valid) moved = cl.box;
                        } catch (const PointAtInfinityError&) {
                        }
                    } else {
                        moved = last;
                    }
                }
                if (!moved) {
                    t.state = TrackState::Terminated;
                    trim_trailing_predictions(t);
                    done.push_back(std::move(t));
                    continue;
                }
                t.observations.push_back({frame, *moved, ObsSource::Predicted});
            }
            still.push_back(std::move(t));
        }
        alive = std::move(still);
        for (std::size_t di = 0; di < fd.size(); ++di)
            if (!d_used[di]) spawn(frame, fd[di].bbox);
    }
    for (auto& t : alive) {
        trim_trailing_predictions(t);
        done.push_back(std::move(t));
    }
    std::sort(done.begin(), done.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
    return done;
}

std::vector<double> rgb_histogram(const PixelImage& image, const BBox& box, int bins) {
    if (bins < 1 || bins > 256) throw Error("rgb_histogram: bins must be in [1, 256]");
    const PixelImage rgb = image.channels() == 3 ? image : to_rgb(image);
    std::vector<double> h(static_cast<std::size_t>(3 * bins), 0.0);
    const PixelRect r = pixel_rect(box, image.size());
    for (int y = r.y0; y < r.y1; ++y)
        for (int x = r.x0; x < r.x1; ++x)
            for (int c = 0; c < 3; ++c) h[static_cast<std::size_t>(c * bins + rgb.at(x, y, c) * bins / 256)] += 1.0;
    return h;
}

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("cosine_distance: length mismatch");
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0 || bb == 0) return 1.0;
    return 1.0 - ab / std::sqrt(aa * bb);
}

std::vector<Track> track_kalman_iou(std::span<const std::vector<Detection>> dets, const KalmanTrackerParams& params,
                                    std::span<const PixelImage> frames) {
    if (params.appearance_gate && frames.size() < dets.size())
        throw Error("track_kalman_iou: the appearance gate needs one image per frame");

    struct Live {
        Track track;
        KalmanBoxFilter kf;
        int hits = 0;
        std::vector<double> hist;
    };
    std::vector<Live> live;
    std::vector<Track> done;
    int next_id = 1;
    constexpr double kRejected = 1e6;

    for (std::size_t f = 0; f < dets.size(); ++f) {
        const int frame = static_cast<int>(f);
        const auto& fd = dets[f];
        std::vector<BBox> predicted;
        predicted.reserve(live.size());
        for (auto& l : live) predicted.push_back(l.kf.predict());

        std::vector<std::vector<double>> det_hist;
        if (params.appearance_gate)
            for (const auto& d : fd) det_hist.push_back(rgb_histogram(frames[f], d.bbox, params.hist_bins));

        Eigen::MatrixXd cost(static_cast<Eigen::Index>(live.size()), static_cast<Eigen::Index>(fd.size()));
        for (std::size_t ti = 0; ti < live.size(); ++ti)
            for (std::size_t di = 0; di < fd.size(); ++di) {
                const double o = iou(predicted[ti], fd[di].bbox);
                bool ok = o >= params.iou_min;
                if (ok && params.appearance_gate && !live[ti].hist.empty())
                    ok = cosine_distance(live[ti].hist, det_hist[di]) <= params.appearance_max_dist;
                cost(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(di)) = ok ? 1.0 - o : kRejected;
            }
        std::vector<int> det_of(live.size(), -1);
        std::vector<char> d_used(fd.size(), 0);
        for (const auto& [ti, di] : hungarian_assign(cost).pairs) {
            if (cost(ti, di) >= kRejected) continue;
            det_of[static_cast<std::size_t>(ti)] = di;
            d_used[static_cast<std::size_t>(di)] = 1;
        }

        std::vector<Live> next;
        for (std::size_t ti = 0; ti < live.size(); ++ti) {
            Live& l = live[ti];
            if (det_of[ti] >= 0) {
                const auto di = static_cast<std::size_t>(det_of[ti]);
                l.kf.update(fd[di].bbox);
                l.track.observations.push_back({frame, fd[di].bbox, ObsSource::Detected});
                l.track.miss_count = 0;
                ++l.hits;
                if (params.appearance_gate) l.hist = det_hist[di];
                if (l.track.state == TrackState::Tentative && l.hits >= params.n_init) {
                    l.track.state = TrackState::Active;
                    l.track.id = next_id++;
                } else if (l.track.state == TrackState::Lost) {
                    l.track.state = TrackState::Active;
                }
                next.push_back(std::move(l));
                continue;
            }
            if (l.track.state == TrackState::Tentative) continue;  // dropped
            ++l.track.miss_count;
            if (l.track.miss_count > params.max_miss) {
                l.track.state = TrackState::Terminated;
                trim_trailing_predictions(l.track);
                done.push_back(std::move(l.track));
                continue;
            }
            l.track.state = TrackState::Lost;
            l.track.observations.push_back({frame, predicted[ti], ObsSource::Predicted});
            next.push_back(std::move(l));
        }
        for (std::size_t di = 0; di < fd.size(); ++di) {
            if (d_used[di] || !(fd[di].bbox.w > 0 && fd[di].bbox.h > 0)) continue;
            Live l{Track{}, KalmanBoxFilter(fd[di].bbox), 1, {}};
            l.track.state = TrackState::Tentative;
            l.track.observations.push_back({frame, fd[di].bbox, ObsSource::Detected});
            if (params.appearance_gate) l.hist = det_hist[di];
            if (params.n_init <= 1) {
                l.track.state = TrackState::Active;
                l.track.id = next_id++;
            }
            next.push_back(std::move(l));
        }
        live = std::move(next);
    }
    for (auto& l : live) {
        if (l.track.state == TrackState::Tentative) continue;
        trim_trailing_predictions(l.track);
        done.push_back(std::move(l.track));
    }
    std::sort(done.begin(), done.end(), [](const Track& a, const Track& b) { return a.id < b.id; });
    return done;
}

std::string tracks_to_json(std::span<const Track> tracks) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& t : tracks) {
        nlohmann::ordered_json obs = nlohmann::ordered_json::array();
        for (const auto& o : t.observations)
            obs.push_back({{"frame", o.frame},
                           {"bbox", {o.bbox.x, o.bbox.y, o.bbox.w, o.bbox.h}},
                           {"source", to_string(o.source)}});
        arr.push_back({{"id", t.id}, {"obs", std::move(obs)}});
    }
    return arr.dump(1) + "\n";
}

std::vector<Track> tracks_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("tracks: ") + e.what());
    }
    if (!j.is_array()) throw ParseError("tracks: top level must be an array");
    std::vector<Track> out;
    std::map<int, bool> seen;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto& jt = j[k];
        const std::string where = "tracks[" + std::to_string(k) + "]";
        try {
            Track t;
            t.id = jt.at("id").get<int>();
            if (seen[t.id]) throw ParseError(where + ": duplicate id " + std::to_string(t.id));
            seen[t.id] = true;
            for (const auto& jo : jt.at("obs")) {
                Observation o;
                o.frame = jo.at("frame").get<int>();
                const auto& b = jo.at("bbox");
                if (!b.is_array() || b.size() != 4) throw ParseError(where + ": bbox must have 4 numbers");
                o.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
                const std::string src = jo.value("source", std::string("detected"));
                if (src == "detected")
                    o.source = ObsSource::Detected;
                else if (src == "predicted")
                    o.source = ObsSource::Predicted;
                else
                    throw ParseError(where + ": unknown source '" + src + "'");
                if (!t.observations.empty() && o.frame <= t.observations.back().frame)
                    throw ParseError(where + ": frames must be strictly increasing");
                t.observations.push_back(o);
            }
            out.push_back(std::move(t));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    return out;
}

void write_tracks(const std::filesystem::path& path, std::span<const Track> tracks) {
    write_text_file(path, tracks_to_json(tracks));
}

std::vector<Track> read_tracks(const std::filesystem::path& path) { return tracks_from_json(read_text_file(path)); }

}  // namespace plg
