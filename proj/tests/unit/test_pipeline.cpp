#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>

#include "plg/config.hpp"
#include "plg/error.hpp"
#include "plg/imageio.hpp"
#include "plg/pipeline.hpp"
#include "plg/synth.hpp"

using namespace plg;
namespace fs = std::filesystem;

namespace {

PipelineInputs inputs_from(const SynthSequence& seq) {
    PipelineInputs in;
    in.frames = seq.frames;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) in.stems.push_back(frame_stem(static_cast<int>(i)));
    in.detections = seq.gt_dets;
    in.gt_tracks = seq.gt_tracks;
    return in;
}

fs::path run_dir(const std::string& name) {
    const fs::path d = fs::path(PLG_TEST_TMP) / "pipeline" / name;
    fs::remove_all(d);
    return d;
}

SynthSequence short_easy() {
    auto sc = make_scenario("easy", 1);
    sc.n_frames = 8;
    return synth_generate(sc);
}

}  // namespace

TEST(Pipeline, ConfigKeysAreRead) {
    const Config raw = Config::parse(
        "[plg]\nskip = 5\ntau = 0.7\n[ransac]\nthreshold_px = 2\n[track]\ntracker = kalman\n[refine]\nmethod = slic\n");
    const auto cfg = PipelineConfig::from(raw, 9, 2);
    EXPECT_EQ(cfg.plg.skip, 5);
    EXPECT_DOUBLE_EQ(cfg.plg.tau, 0.7);
    EXPECT_DOUBLE_EQ(cfg.plg.geometry.ransac.threshold_px, 2);
    EXPECT_EQ(cfg.plg.geometry.ransac.seed, 9u);
    EXPECT_EQ(cfg.tracker, "kalman");
    EXPECT_EQ(cfg.refine, RefineMethod::Slic);
    EXPECT_THROW(PipelineConfig::from(Config::parse("[track]\ntracker = deep\n"), 0, 1), ParseError);
    EXPECT_NE(config_hash(raw, 1), config_hash(raw, 2));
}

TEST(Pipeline, ZeroDetectionsGiveOnlyFalseNegatives) {
    const auto seq = short_easy();
    auto in = inputs_from(seq);
    for (auto& d : in.detections) d.clear();
    const Config raw;
    const auto res = run_pipeline(in, PipelineConfig::from(raw, 0, 1), raw, run_dir("zero"));
    EXPECT_TRUE(res.tracks.empty());
    for (std::size_t f = 0; f < seq.frames.size(); ++f) EXPECT_TRUE(res.labels.frames[f].empty());
    ASSERT_TRUE(res.report);
    EXPECT_EQ(res.report->tp, 0);
    EXPECT_EQ(res.report->fn, res.report->gt_dets);
    EXPECT_GT(res.report->gt_dets, 0);
}

TEST(Pipeline, ManifestListsEveryFileAndIsReproducible) {
    const auto seq = short_easy();
    const Config raw = Config::parse("[plg]\nskip = 2\n");
    const auto cfg = PipelineConfig::from(raw, 3, 1);
    const fs::path a = run_dir("m1"), b = run_dir("m2");
    run_pipeline(inputs_from(seq), cfg, raw, a);
    run_pipeline(inputs_from(seq), cfg, raw, b);
    const auto ma = nlohmann::json::parse(read_text_file(a / "manifest.json"));
    const auto mb = nlohmann::json::parse(read_text_file(b / "manifest.json"));
    EXPECT_EQ(ma["files"], mb["files"]);
    EXPECT_EQ(ma["config_hash"], mb["config_hash"]);
    std::size_t on_disk = 0;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file() && e.path().filename() != "manifest.json") ++on_disk;
    EXPECT_EQ(ma["files"].size(), on_disk);
    for (const char* f : {"tracks.json", "report.json", "provenance.json", "frames/frame_0000.png", "labels/frame_0001.txt"})
        EXPECT_TRUE(fs::exists(a / f)) << f;
    std::vector<std::string> names;
    for (const auto& s : ma["stages"]) names.push_back(s["name"]);
    EXPECT_EQ(names, (std::vector<std::string>{"frames", "features", "boxes", "track", "eval"}));
    EXPECT_FALSE(ma.contains("failed_stage"));
}

TEST(Pipeline, FailingStageKeepsPartialArtifacts) {
    const auto seq = short_easy();
    auto in = inputs_from(seq);
    in.gt_tracks = std::vector<Track>{};  // no ground truth boxes: evaluation cannot run
    const Config raw;
    const fs::path d = run_dir("fail");
    try {
        run_pipeline(in, PipelineConfig::from(raw, 0, 1), raw, d);
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "eval");
    }
    EXPECT_TRUE(fs::exists(d / "tracks.json"));
    const auto m = nlohmann::json::parse(read_text_file(d / "manifest.json"));
    EXPECT_EQ(m["failed_stage"], "eval");
    EXPECT_EQ(m["stages"].size(), 4u);
}

TEST(Pipeline, RefineStageWritesMasks) {
    auto sc = make_scenario("easy", 1);
    sc.n_frames = 3;
    const auto seq = synth_generate(sc);
    auto in = inputs_from(seq);
    MaskDataset masks;
    for (std::size_t f = 0; f < seq.frames.size(); ++f)
        masks.images.push_back({frame_stem(static_cast<int>(f)), frame_stem(static_cast<int>(f)) + ".png", 320, 240});
    for (std::size_t f = 0; f < seq.frames.size(); ++f)
        for (std::size_t i = 0; i < seq.gt_masks[f].size(); ++i)
            masks.instances.push_back({frame_stem(static_cast<int>(f)), static_cast<int>(i), seq.gt_masks[f][i], seq.gt_dets[f][i].bbox});
    in.masks = masks;
    const Config raw = Config::parse("[refine]\nmethod = dilation\n");
    const fs::path d = run_dir("refine");
    const auto res = run_pipeline(in, PipelineConfig::from(raw, 0, 1), raw, d);
    ASSERT_TRUE(res.refined);
    EXPECT_EQ(res.refined->instances.size(), masks.instances.size());
    EXPECT_TRUE(fs::exists(d / "masks" / "index.json"));
}
