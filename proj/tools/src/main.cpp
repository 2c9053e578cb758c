#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifdef PLG_CLI11_SINGLE_HEADER
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "overlay.hpp"
#include "plg/config.hpp"
#include "plg/consistency.hpp"
#include "plg/error.hpp"
#include "plg/features.hpp"
#include "plg/imageio.hpp"
#include "plg/log.hpp"
#include "plg/metrics.hpp"
#include "plg/parallel.hpp"
#include "plg/pipeline.hpp"
#include "plg/synth.hpp"
#include "plg/tracking.hpp"

namespace fs = std::filesystem;
using namespace plg;

namespace {

struct Globals {
    std::string config;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out;
    int verbose = 0;
    bool quiet = false;
};

Config load_config(const Globals& g) { return g.config.empty() ? Config{} : Config::load(g.config); }

std::string require_out(const Globals& g, const char* what) {
    if (g.out.empty()) throw Error(std::string("--out ") + what + " is required");
    return g.out;
}

struct LoadedFrames {
    FrameSequence seq;
    std::vector<PixelImage> images;
    std::vector<std::string> stems;
};

LoadedFrames load_frames(const fs::path& dir, int jobs) {
    LoadedFrames lf;
    lf.seq = load_frame_dir(dir);
    lf.images.resize(lf.seq.size());
    parallel_for(lf.seq.size(), jobs, [&](std::size_t i) { lf.images[i] = lf.seq.load(i); });
    for (const auto& f : lf.seq.frames) lf.stems.push_back(f.path.stem().string());
    for (const auto& im : lf.images)
        if (im.size() != lf.images.front().size()) throw Error("frames in " + dir.string() + " differ in size");
    return lf;
}

// dets/<stem>.txt per frame; a missing file means no detections.
std::vector<std::vector<Detection>> load_dets(const fs::path& dir, const LoadedFrames& lf) {
    if (!fs::is_directory(dir)) throw IoError("detection directory not found: " + dir.string());
    std::vector<std::vector<Detection>> out(lf.images.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const fs::path p = dir / (lf.stems[i] + ".txt");
        if (fs::exists(p)) out[i] = read_yolo_labels(p, lf.images[i].size(), static_cast<int>(i));
    }
    return out;
}

// Track frames are positions internally; files use the frame numbers.
void to_frame_numbers(std::vector<Track>& tracks, const FrameSequence& seq) {
    for (auto& t : tracks)
        for (auto& o : t.observations) o.frame = seq.frames.at(static_cast<std::size_t>(o.frame)).index;
}

int cmd_synth(const Globals& g, const std::string& scenario, int n_frames, const DetectorNoise& noise_in) {
    const fs::path out = require_out(g, "DIR");
    SynthScenario sc = make_scenario(scenario, g.seed);
    if (n_frames > 0) sc.n_frames = n_frames;
    const SynthSequence seq = synth_generate(sc);
    write_synth(out, seq);
    DetectorNoise noise = noise_in;
    noise.seed = g.seed;
    const auto dets = simulate_detector(seq, noise);
    fs::create_directories(out / "dets");
    for (std::size_t f = 0; f < dets.size(); ++f)
        write_yolo_labels(out / "dets" / (frame_stem(static_cast<int>(f)) + ".txt"), dets[f], seq.frames[f].size());
    std::printf("synth: %zu frames, %zu GT tracks -> %s\n", seq.frames.size(), seq.gt_tracks.size(), out.string().c_str());
    return 0;
}

int cmd_match(const Globals& g, const std::string& a, const std::string& b) {
    const Config cfg = load_config(g);
    const PipelineConfig pc = PipelineConfig::from(cfg, g.seed, g.jobs);
    const HarrisBriefBackend backend(pc.max_keypoints);
    const PixelImage ia = read_image(a), ib = read_image(b);
    const FeatureSet fa = backend.extract(ia), fb = backend.extract(ib);
    const VerifiedPair vp = verify_frame_pair(fa, fb, pc.plg.geometry);
    std::printf("keypoints: %zu / %zu\nmatches: %zu\n", fa.keypoints.size(), fb.keypoints.size(), vp.raw.size());
    if (vp.ransac) {
        std::printf("inliers: %zu (ratio %.3f, %d iterations)\nH =\n", vp.ransac->inliers.size(), vp.ransac->inlier_ratio,
                    vp.ransac->n_iterations);
        for (int r = 0; r < 3; ++r)
            std::printf("  %12.6g %12.6g %12.6g\n", vp.ransac->model(r, 0), vp.ransac->model(r, 1), vp.ransac->model(r, 2));
    } else {
        std::printf("inliers: none (verification failed)\n");
    }
    if (!g.out.empty()) {
        const fs::path out = g.out;
        fs::create_directories(out);
        write_keypoints_csv(out / "keypoints_a.csv", 0, fa.keypoints);
        write_keypoints_csv(out / "keypoints_b.csv", 1, fb.keypoints);
        write_matches_csv(out / "matches.csv", vp.raw);
        if (vp.ransac) write_matches_csv(out / "inliers.csv", vp.ransac->inliers);
    }
    return 0;
}

int cmd_boxes(const Globals& g, const std::string& frames, const std::string& dets, std::optional<int> skip,
              std::optional<double> tau) {
    const fs::path out = require_out(g, "DIR");
    Config cfg = load_config(g);
    if (skip) cfg.set("plg.skip", std::to_string(*skip));
    if (tau) cfg.set("plg.tau", std::to_string(*tau));
    const PipelineConfig pc = PipelineConfig::from(cfg, g.seed, g.jobs);
    const LoadedFrames lf = load_frames(frames, g.jobs);
    const auto det = load_dets(dets, lf);
    std::vector<FeatureSet> feats(lf.images.size());
    const HarrisBriefBackend backend(pc.max_keypoints);
    parallel_for(feats.size(), g.jobs, [&](std::size_t i) { feats[i] = backend.extract(lf.images[i]); });
    const PseudoLabelSet set = generate_pseudolabels(feats, det, pc.plg);
    write_pseudolabels(out, out / "provenance.json", set, lf.stems, lf.images.front().size());
    std::printf("boxes: %zu keyframe, %zu interpolated, %zu failed pairs\n", set.count(Provenance::KeyframeDetection),
                set.count(Provenance::Interpolated), set.failures.size());
    return 0;
}

int cmd_refine(const Globals& g, const std::string& method, const std::string& masks, const std::string& images) {
    const fs::path out = require_out(g, "INDEX");
    Config cfg = load_config(g);
    cfg.set("refine.method", method);
    const PipelineConfig pc = PipelineConfig::from(cfg, g.seed, g.jobs);
    const MaskDataset data = read_instance_masks(masks);
    std::vector<std::pair<std::string, PixelImage>> imgs;
    for (const auto& e : data.images) {
        PixelImage im = read_image(fs::path(images) / e.file);
        if (im.width() != e.width || im.height() != e.height)
            throw Error("image " + e.file + " is " + std::to_string(im.width()) + "x" + std::to_string(im.height()) +
                        " but the mask index says " + std::to_string(e.width) + "x" + std::to_string(e.height));
        imgs.emplace_back(e.id, std::move(im));
    }
    const MaskDataset refined = refine_masks(data, imgs, pc);
    write_instance_masks(out, refined);
    std::printf("refine: %zu instances (%s) -> %s\n", refined.instances.size(), method.c_str(), out.string().c_str());
    return 0;
}

int cmd_track(const Globals& g, const std::string& tracker, const std::string& frames, const std::string& dets) {
    const fs::path out = require_out(g, "tracks.json");
    Config cfg = load_config(g);
    cfg.set("track.tracker", tracker);
    const PipelineConfig pc = PipelineConfig::from(cfg, g.seed, g.jobs);
    const LoadedFrames lf = load_frames(frames, g.jobs);
    const auto det = load_dets(dets, lf);
    std::vector<Track> tracks;
    if (pc.tracker == "kalman") {
        tracks = track_kalman_iou(det, pc.kalman, lf.images);
    } else {
        std::vector<FeatureSet> feats(lf.images.size());
        const HarrisBriefBackend backend(pc.max_keypoints);
        parallel_for(feats.size(), g.jobs, [&](std::size_t i) { feats[i] = backend.extract(lf.images[i]); });
        tracks = track_sfm(feats, det, pc.plg.geometry, pc.sfm);
    }
    to_frame_numbers(tracks, lf.seq);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_tracks(out, tracks);
    std::printf("track: %zu tracks -> %s\n", tracks.size(), out.string().c_str());
    return 0;
}

int cmd_eval(const Globals& g, const std::string& gt, const std::string& hyp, std::optional<double> gate,
             const std::string& report, const std::string& csv, const std::string& label) {
    Config cfg = load_config(g);
    if (gate) cfg.set("eval.iou_gate", std::to_string(*gate));
    const PipelineConfig pc = PipelineConfig::from(cfg, g.seed, g.jobs);
    const MotReport r = evaluate(read_tracks(gt), read_tracks(hyp), pc.eval);
    const std::string json = report_to_json(r);
    const std::string dest = !report.empty() ? report : g.out;
    if (!dest.empty()) write_text_file(dest, json);
    if (!csv.empty()) {
        const bool fresh = !fs::exists(csv);
        const std::string row = (fresh ? report_csv_header() : std::string()) + report_csv_row(r, label);
        FILE* f = std::fopen(csv.c_str(), "a");
        if (!f) throw IoError("cannot open " + csv);
        std::fputs(row.c_str(), f);
        std::fclose(f);
    }
    std::fputs(json.c_str(), stdout);
    return 0;
}

struct E2eArgs {
    std::string scenario;
    std::string frames, dets, gt, masks;
    std::optional<int> skip;
    std::string tracker, refine;
    double box_sigma = 0.02;
};

int cmd_e2e(const Globals& g, const E2eArgs& a) {
    const fs::path out = require_out(g, "DIR");
    Config cfg = load_config(g);
    if (a.skip) cfg.set("plg.skip", std::to_string(*a.skip));
    if (!a.tracker.empty()) cfg.set("track.tracker", a.tracker);
    if (!a.refine.empty()) cfg.set("refine.method", a.refine);

    PipelineInputs in;
    if (!a.scenario.empty()) {
        cfg.set("synth.scenario", a.scenario);
        cfg.set("synth.box_sigma", std::to_string(a.box_sigma));
        const SynthSequence seq = synth_generate(make_scenario(a.scenario, g.seed));
        DetectorNoise noise;
        noise.box_sigma = a.box_sigma;
        noise.seed = g.seed;
        in.frames = seq.frames;
        for (std::size_t f = 0; f < seq.frames.size(); ++f) in.stems.push_back(frame_stem(static_cast<int>(f)));
        in.detections = simulate_detector(seq, noise);
        in.gt_tracks = seq.gt_tracks;
        MaskDataset md;
        for (std::size_t f = 0; f < seq.frames.size(); ++f) {
            md.images.push_back({in.stems[f], in.stems[f] + ".png", seq.frames[f].width(), seq.frames[f].height()});
            for (std::size_t i = 0; i < seq.gt_dets[f].size(); ++i) {
                // Under-segmented starting masks: the synthetic stand-in for coarse pseudo-masks.
                PixelImage m = erode(seq.gt_masks[f][i], StructuringElement::disk(1), 3);
                md.instances.push_back({in.stems[f], seq.gt_ids[f][i], std::move(m), seq.gt_dets[f][i].bbox});
            }
        }
        in.masks = std::move(md);
    } else {
        if (a.frames.empty() || a.dets.empty()) throw Error("e2e needs --scenario or both --frames and --dets");
        LoadedFrames lf = load_frames(a.frames, g.jobs);
        in.detections = load_dets(a.dets, lf);
        in.frames = std::move(lf.images);
        in.stems = std::move(lf.stems);
        if (!a.gt.empty()) in.gt_tracks = read_tracks(a.gt);
        if (!a.masks.empty()) in.masks = read_instance_masks(a.masks);
    }
    const PipelineConfig pc = PipelineConfig::from(cfg, g.seed, g.jobs);
    const PipelineResult res = run_pipeline(in, pc, cfg, out);
    std::printf("e2e: %zu frames, %zu pseudo-labels, %zu tracks\n", in.frames.size(),
                res.labels.count(Provenance::KeyframeDetection) + res.labels.count(Provenance::Interpolated),
                res.tracks.size());
    if (res.report)
        std::printf("MOTA %.4f  MOTP %s  IDsw %ld  IDs %ld / GT %ld  yield_err %ld%%\n", res.report->mota,
                    res.report->motp ? std::to_string(*res.report->motp).c_str() : "n/a", res.report->id_sw,
                    res.report->ids, res.report->gt_ids, res.report->yield_err);
    for (const auto& t : res.timings) std::printf("  %-10s %.3f s\n", t.name.c_str(), t.seconds);
    return 0;
}

int cmd_overlay(const Globals& g, const std::string& frames, const std::string& labels, const std::string& tracks,
                const std::string& masks) {
    const fs::path out = require_out(g, "DIR");
    const LoadedFrames lf = load_frames(frames, g.jobs);
    std::map<int, std::vector<std::pair<int, BBox>>> boxes;  // frame number -> (color id, box)
    if (!tracks.empty())
        for (const auto& t : read_tracks(tracks))
            for (const auto& o : t.observations) boxes[o.frame].emplace_back(t.id, o.bbox);
    std::vector<std::vector<Detection>> lab;
    if (!labels.empty()) lab = load_dets(labels, lf);
    std::optional<MaskDataset> md;
    if (!masks.empty()) md = read_instance_masks(masks);
    fs::create_directories(out);
    parallel_for(lf.images.size(), g.jobs, [&](std::size_t i) {
        PixelImage img = to_rgb(lf.images[i]);
        if (md)
            for (const auto& inst : md->instances)
                if (inst.image_id == lf.stems[i]) plgtool::tint_mask(img, inst.mask, plgtool::id_color(inst.instance_id));
        if (!lab.empty())
            for (const auto& d : lab[i]) plgtool::draw_box(img, d.bbox, {255, 255, 255}, 1);
        if (const auto it = boxes.find(lf.seq.frames[i].index); it != boxes.end())
            for (const auto& [id, b] : it->second) plgtool::draw_box(img, b, plgtool::id_color(id));
        write_image(out / (lf.stems[i] + ".png"), img);
    });
    std::printf("overlay: %zu frames -> %s\n", lf.images.size(), out.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-label generation, mask refinement, tracking and MOT evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(plg::version()));
    Globals g;
    app.add_option("--config", g.config, "INI configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output path (directory or file, per subcommand)");
    app.add_flag("-v,--verbose", g.verbose, "More logging (repeatable)");
    app.add_flag("-q,--quiet", g.quiet, "Errors only");
    app.fallthrough();

    int rc = 0;
    std::function<int()> run;

    auto* synth = app.add_subcommand("synth", "Render a synthetic sequence with ground truth and simulated detections");
    std::string scenario = "easy";
    int n_frames = 0;
    DetectorNoise noise;
    synth->add_option("--scenario", scenario, "easy|skiptrend|occlusion|crossing|hd")->capture_default_str();
    synth->add_option("--frames", n_frames, "Override the frame count");
    synth->add_option("--box-sigma", noise.box_sigma, "Detector box jitter (fraction of size)");
    synth->add_option("--miss-rate", noise.miss_rate, "Detector miss probability");
    synth->add_option("--fp-rate", noise.fp_rate, "False positives per frame");
    synth->callback([&] { run = [&] { return cmd_synth(g, scenario, n_frames, noise); }; });

    auto* match = app.add_subcommand("match", "Match two images and verify with a homography");
    std::string img_a, img_b;
    match->add_option("a", img_a, "First image")->required()->check(CLI::ExistingFile);
    match->add_option("b", img_b, "Second image")->required()->check(CLI::ExistingFile);
    match->callback([&] { run = [&] { return cmd_match(g, img_a, img_b); }; });

    auto* boxes = app.add_subcommand("boxes", "Dense box pseudo-labels from keyframe detections");
    std::string frames_dir, dets_dir;
    std::optional<int> skip;
    std::optional<double> tau;
    boxes->add_option("--frames", frames_dir)->required()->check(CLI::ExistingDirectory);
    boxes->add_option("--dets", dets_dir)->required()->check(CLI::ExistingDirectory);
    boxes->add_option("--skip", skip, "Keyframe spacing");
    boxes->add_option("--tau", tau, "Confidence threshold");
    boxes->callback([&] { run = [&] { return cmd_boxes(g, frames_dir, dets_dir, skip, tau); }; });

    auto* refine = app.add_subcommand("refine", "Refine instance masks");
    std::string method, masks_index, images_dir;
    refine->add_option("--method", method)->required()->check(CLI::IsMember({"dilation", "slic", "grabcut"}));
    refine->add_option("--masks", masks_index, "Mask index JSON")->required()->check(CLI::ExistingFile);
    refine->add_option("--images", images_dir)->required()->check(CLI::ExistingDirectory);
    refine->callback([&] { run = [&] { return cmd_refine(g, method, masks_index, images_dir); }; });

    auto* track = app.add_subcommand("track", "Track detections across frames");
    std::string tracker = "sfm";
    track->add_option("--tracker", tracker)->check(CLI::IsMember({"sfm", "kalman"}))->capture_default_str();
    track->add_option("--frames", frames_dir)->required()->check(CLI::ExistingDirectory);
    track->add_option("--dets", dets_dir)->required()->check(CLI::ExistingDirectory);
    track->callback([&] { run = [&] { return cmd_track(g, tracker, frames_dir, dets_dir); }; });

    auto* eval = app.add_subcommand("eval", "CLEAR-MOT metrics and yield error");
    std::string gt, hyp, report, csv, label = "run";
    std::optional<double> gate;
    eval->add_option("--gt", gt)->required()->check(CLI::ExistingFile);
    eval->add_option("--hyp", hyp)->required()->check(CLI::ExistingFile);
    eval->add_option("--iou-gate", gate);
    eval->add_option("--report", report, "report.json path (defaults to --out)");
    eval->add_option("--csv", csv, "Append a CSV row to this file");
    eval->add_option("--label", label, "CSV row label");
    eval->callback([&] { run = [&] { return cmd_eval(g, gt, hyp, gate, report, csv, label); }; });

    auto* e2e = app.add_subcommand("e2e", "Full pipeline into a run directory");
    E2eArgs ea;
    e2e->add_option("--scenario", ea.scenario, "Synthetic input preset");
    e2e->add_option("--frames", ea.frames)->check(CLI::ExistingDirectory);
    e2e->add_option("--dets", ea.dets)->check(CLI::ExistingDirectory);
    e2e->add_option("--gt", ea.gt, "GT tracks.json")->check(CLI::ExistingFile);
    e2e->add_option("--masks", ea.masks, "Initial mask index")->check(CLI::ExistingFile);
    e2e->add_option("--skip", ea.skip);
    e2e->add_option("--tracker", ea.tracker)->check(CLI::IsMember({"sfm", "kalman"}));
    e2e->add_option("--refine", ea.refine)->check(CLI::IsMember({"none", "dilation", "slic", "grabcut"}));
    e2e->add_option("--box-sigma", ea.box_sigma, "Synthetic detector jitter")->capture_default_str();
    e2e->callback([&] { run = [&] { return cmd_e2e(g, ea); }; });

    auto* overlay = app.add_subcommand("overlay", "Draw boxes and masks onto frames");
    std::string labels_dir, tracks_file, overlay_masks;
    overlay->add_option("--frames", frames_dir)->required()->check(CLI::ExistingDirectory);
    overlay->add_option("--labels", labels_dir)->check(CLI::ExistingDirectory);
    overlay->add_option("--tracks", tracks_file)->check(CLI::ExistingFile);
    overlay->add_option("--masks", overlay_masks)->check(CLI::ExistingFile);
    overlay->callback([&] { run = [&] { return cmd_overlay(g, frames_dir, labels_dir, tracks_file, overlay_masks); }; });

    CLI11_PARSE(app, argc, argv);
    log::set_level(g.quiet ? 3 : std::max(0, 2 - g.verbose));
    try {
        rc = run ? run() : 0;
    } catch (const StageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}
