#include "plg/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <map>

#include <nlohmann/json.hpp>

#include "plg/error.hpp"
#include "plg/features.hpp"
#include "plg/hash.hpp"
#include "plg/log.hpp"
#include "plg/parallel.hpp"

#ifndef PLG_VERSION_STRING
#define PLG_VERSION_STRING "unknown"
#endif

namespace plg {

namespace fs = std::filesystem;

const char* version() noexcept { return PLG_VERSION_STRING; }

RefineMethod parse_refine_method(std::string_view s) {
    if (s == "none" || s.empty()) return RefineMethod::None;
    if (s == "dilation") return RefineMethod::Dilation;
    if (s == "slic") return RefineMethod::Slic;
    if (s == "grabcut") return RefineMethod::GrabCut;
    throw ParseError("unknown refine method '" + std::string(s) + "'");
}

PipelineConfig PipelineConfig::from(const Config& c, std::uint64_t seed, int jobs) {
    PipelineConfig p;
    p.seed = seed;
    p.jobs = std::max(1, jobs);
    p.max_keypoints = c.get_int("features.max_keypoints", p.max_keypoints);
    p.plg.skip = c.get_int("plg.skip", p.plg.skip);
    p.plg.tau = c.get_double("plg.tau", p.plg.tau);
    p.plg.dedup = c.get_bool("plg.dedup", p.plg.dedup);
    p.plg.dedup_iou = c.get_double("plg.dedup_iou", p.plg.dedup_iou);
    p.plg.transfer.min_features = c.get_int("plg.min_features", p.plg.transfer.min_features);
    auto& g = p.plg.geometry;
    g.max_match_dist = c.get_int("match.max_dist", g.max_match_dist);
    g.ransac.threshold_px = c.get_double("ransac.threshold_px", g.ransac.threshold_px);
    g.ransac.max_iters = c.get_int("ransac.max_iters", g.ransac.max_iters);
    g.ransac.confidence = c.get_double("ransac.confidence", g.ransac.confidence);
    g.per_box_ransac = c.get_bool("ransac.per_box", g.per_box_ransac);
    g.ransac.seed = c.has("ransac.seed") ? static_cast<std::uint64_t>(c.get_int("ransac.seed", 0)) : seed;
    p.tracker = c.get_string("track.tracker", p.tracker);
    if (p.tracker != "sfm" && p.tracker != "kalman") throw ParseError("track.tracker must be sfm or kalman");
    p.sfm.v_min = c.get_double("track.v_min", p.sfm.v_min);
    p.sfm.max_miss = c.get_int("track.max_miss", p.sfm.max_miss);
    p.sfm.transfer = p.plg.transfer;
    p.kalman.max_miss = p.sfm.max_miss;
    p.kalman.n_init = c.get_int("track.n_init", p.kalman.n_init);
    p.kalman.iou_min = c.get_double("track.iou_min", p.kalman.iou_min);
    p.kalman.appearance_gate = c.get_bool("track.appearance", p.kalman.appearance_gate);
    p.refine = parse_refine_method(c.get_string("refine.method", "none"));
    p.slic.k = c.get_int("slic.k", p.slic.k);
    p.slic.compactness = c.get_double("slic.m", p.slic.compactness);
    p.vote.upper = c.get_double("slic.tu", p.vote.upper);
    p.vote.lower = c.get_double("slic.tl", p.vote.lower);
    p.grabcut.alpha = c.get_double("grabcut.alpha", p.grabcut.alpha);
    p.grabcut.n_iters = c.get_int("grabcut.iters", p.grabcut.n_iters);
    p.grabcut.gamma = c.get_double("grabcut.gamma", p.grabcut.gamma);
    p.grabcut.seed = seed;
    p.eval.iou_gate = c.get_double("eval.iou_gate", p.eval.iou_gate);
    return p;
}

std::string config_hash(const Config& cfg, std::uint64_t seed) {
    return sha256_hex(cfg.canonical() + "seed=" + std::to_string(seed) + "\n");
}

MaskDataset refine_masks(const MaskDataset& masks, const std::vector<std::pair<std::string, PixelImage>>& images,
                         const PipelineConfig& cfg) {
    MaskDataset out = masks;
    if (cfg.refine == RefineMethod::None) return out;
    std::map<std::string, const PixelImage*, std::less<>> by_id;
    for (const auto& [id, img] : images) by_id[id] = &img;

    // One superpixel map per image, shared by its instances.
    std::map<std::string, SuperpixelMap, std::less<>> sp;
    if (cfg.refine == RefineMethod::Slic) {
        std::vector<std::string> ids;
        for (const auto& inst : masks.instances)
            if (by_id.count(inst.image_id) && !sp.count(inst.image_id)) {
                ids.push_back(inst.image_id);
                sp[inst.image_id] = {};
            }
        std::vector<SuperpixelMap> maps(ids.size());
        parallel_for(ids.size(), cfg.jobs, [&](std::size_t i) {
            const PixelImage& img = *by_id.at(ids[i]);
            SlicParams sp_params = cfg.slic;
            sp_params.k = std::min<int>(sp_params.k, static_cast<int>(img.pixel_count()));
            maps[i] = slic(img, sp_params);
        });
        for (std::size_t i = 0; i < ids.size(); ++i) sp[ids[i]] = std::move(maps[i]);
    }

    parallel_for(out.instances.size(), cfg.jobs, [&](std::size_t i) {
        InstanceMask& inst = out.instances[i];
        const auto it = by_id.find(inst.image_id);
        if (it == by_id.end()) {
            log::warn("refine: no image for '" + inst.image_id + "', mask kept");
            return;
        }
        if (inst.is_empty()) {
            log::warn("refine: empty mask " + inst.image_id + "#" + std::to_string(inst.instance_id) + " kept");
            return;
        }
        switch (cfg.refine) {
            case RefineMethod::Dilation: inst.mask = refine_dilation(inst.mask, inst.ref_bbox); break;
            case RefineMethod::Slic: inst.mask = refine_slic(inst.mask, sp.at(inst.image_id), cfg.vote); break;
            case RefineMethod::GrabCut: {
                GrabCutParams gp = cfg.grabcut;
                gp.seed = cfg.grabcut.seed + i;
                inst.mask = refine_grabcut(*it->second, inst.mask, inst.ref_bbox, gp);
                break;
            }
            case RefineMethod::None: break;
        }
    });
    return out;
}

namespace {

using Clock = std::chrono::steady_clock;

void write_manifest(const fs::path& run_dir, const Config& raw, const PipelineConfig& cfg,
                    const std::vector<StageTiming>& timings, const std::string& failed_stage) {
    nlohmann::ordered_json m;
    m["version"] = version();
    m["seed"] = cfg.seed;
    m["config_hash"] = config_hash(raw, cfg.seed);
    nlohmann::ordered_json conf = nlohmann::ordered_json::object();
    for (const auto& [k, v] : raw.entries()) conf[k] = v;
    m["config"] = conf;
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& t : timings) stages.push_back({{"name", t.name}, {"seconds", t.seconds}});
    m["stages"] = stages;
    if (!failed_stage.empty()) m["failed_stage"] = failed_stage;

    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(run_dir))
        if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
    std::vector<std::pair<std::string, fs::path>> rel;
    for (const auto& f : files) rel.emplace_back(fs::relative(f, run_dir).generic_string(), f);
    std::sort(rel.begin(), rel.end());
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [r, f] : rel) arr.push_back({{"path", r}, {"sha256", sha256_file(f)}});
    m["files"] = arr;
    write_text_file(run_dir / "manifest.json", m.dump(2) + "\n");
}

}  // namespace

PipelineResult run_pipeline(const PipelineInputs& in, const PipelineConfig& cfg, const Config& raw,
                            const fs::path& run_dir) {
    if (in.frames.empty()) throw Error("pipeline: no frames");
    if (in.stems.size() != in.frames.size()) throw Error("pipeline: one stem per frame required");
    const ImageSize size = in.frames.front().size();
    for (const auto& f : in.frames)
        if (f.size() != size) throw Error("pipeline: frames differ in size");

    PipelineResult res;
    fs::create_directories(run_dir);
    std::string current;
    auto stage = [&](const std::string& name, auto&& body) {
        current = name;
        const auto t0 = Clock::now();
        try {
            body();
        } catch (const std::exception& e) {
            write_manifest(run_dir, raw, cfg, res.timings, name);
            throw StageError(name, e.what());
        }
        res.timings.push_back({name, std::chrono::duration<double>(Clock::now() - t0).count()});
        log::info("stage " + name + " done");
    };

    stage("frames", [&] {
        fs::create_directories(run_dir / "frames");
        parallel_for(in.frames.size(), cfg.jobs,
                     [&](std::size_t i) { write_image(run_dir / "frames" / (in.stems[i] + ".png"), in.frames[i]); });
    });

    std::vector<FeatureSet> features(in.frames.size());
    stage("features", [&] {
        const HarrisBriefBackend backend(cfg.max_keypoints);
        parallel_for(in.frames.size(), cfg.jobs, [&](std::size_t i) { features[i] = backend.extract(in.frames[i]); });
    });

    stage("boxes", [&] {
        res.labels = generate_pseudolabels(features, in.detections, cfg.plg);
        write_pseudolabels(run_dir / "labels", run_dir / "provenance.json", res.labels, in.stems, size);
    });

    if (in.masks && cfg.refine != RefineMethod::None) {
        stage("refine", [&] {
            std::vector<std::pair<std::string, PixelImage>> images;
            for (std::size_t i = 0; i < in.frames.size(); ++i) images.emplace_back(in.stems[i], in.frames[i]);
            res.refined = refine_masks(*in.masks, images, cfg);
            fs::create_directories(run_dir / "masks");
            write_instance_masks(run_dir / "masks" / "index.json", *res.refined);
        });
    }

    stage("track", [&] {
        std::vector<std::vector<Detection>> per_frame(in.frames.size());
        for (std::size_t f = 0; f < per_frame.size(); ++f) per_frame[f] = res.labels.detections(f);
        if (cfg.tracker == "kalman")
            res.tracks = track_kalman_iou(per_frame, cfg.kalman, in.frames);
        else
            res.tracks = track_sfm(features, per_frame, cfg.plg.geometry, cfg.sfm);
        write_tracks(run_dir / "tracks.json", res.tracks);
    });

    if (in.gt_tracks) {
        stage("eval", [&] {
            res.report = evaluate(*in.gt_tracks, res.tracks, cfg.eval);
            write_text_file(run_dir / "report.json", report_to_json(*res.report));
        });
    }
    write_manifest(run_dir, raw, cfg, res.timings, "");
    return res;
}

}  // namespace plg
