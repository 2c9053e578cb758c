#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "plg/error.hpp"
#include "plg/imageio.hpp"
#include "plg/random.hpp"

using namespace plg;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::path(PLG_TEST_TMP) / "imageio" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

PixelImage noise_image(int w, int h, int c, std::uint64_t seed) {
    Rng rng(seed);
    PixelImage img(w, h, c);
    for (auto& v : img.data()) v = static_cast<std::uint8_t>(uniform_index(rng, 256));
    return img;
}

}  // namespace

TEST(RasterIo, PngAndPnmRoundTripExactly) {
    const fs::path d = fresh_dir("raster");
    for (const char* ext : {".png", ".ppm"}) {
        const PixelImage img = noise_image(13, 7, 3, 1);
        write_image(d / (std::string("rgb") + ext), img);
        EXPECT_EQ(read_image(d / (std::string("rgb") + ext)), img) << ext;
    }
    for (const char* ext : {".png", ".pgm"}) {
        const PixelImage img = noise_image(9, 11, 1, 2);
        write_image(d / (std::string("gray") + ext), img);
        EXPECT_EQ(read_image(d / (std::string("gray") + ext)), img) << ext;
    }
    EXPECT_THROW(read_image(d / "missing.png"), IoError);
}

TEST(FrameDir, ListsFramesByIndex) {
    const fs::path d = fresh_dir("frames10");
    const PixelImage img(4, 4, 1);
    for (int i = 9; i >= 0; --i) {
        char name[16];
        std::snprintf(name, sizeof name, "f%03d.png", i);
        write_image(d / name, img);
    }
    const FrameSequence seq = load_frame_dir(d);
    ASSERT_EQ(seq.size(), 10u);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(seq.frames[static_cast<std::size_t>(i)].index, i);
    EXPECT_TRUE(seq.missing.empty());
}

TEST(FrameDir, ReportsGaps) {
    const fs::path d = fresh_dir("gap");
    write_image(d / "f000.png", PixelImage(4, 4, 1));
    write_image(d / "f002.png", PixelImage(4, 4, 1));
    const FrameSequence seq = load_frame_dir(d);
    EXPECT_EQ(seq.size(), 2u);
    ASSERT_EQ(seq.missing.size(), 1u);
    EXPECT_EQ(seq.missing[0], 1);
}

TEST(FrameDir, ErrorsOnEmptyMissingAndDuplicate) {
    const fs::path d = fresh_dir("empty");
    try {
        load_frame_dir(d);
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("no frames"), std::string::npos);
    }
    EXPECT_THROW(load_frame_dir(d / "nope"), IoError);
    const fs::path dup = fresh_dir("dup");
    write_image(dup / "a1.png", PixelImage(4, 4, 1));
    write_image(dup / "b01.png", PixelImage(4, 4, 1));
    EXPECT_THROW(load_frame_dir(dup), IoError);
    const fs::path bad = fresh_dir("bad");
    std::ofstream(bad / "f000.png") << "not a png";
    // Frames are decoded lazily; a corrupt file fails on load.
    const auto seq = load_frame_dir(bad);
    EXPECT_THROW(seq.load(0), IoError);
}

TEST(YoloLabels, ParsesNormalizedBoxes) {
    const auto full = parse_yolo_labels("0 0.5 0.5 1.0 1.0\n", {100, 100});
    ASSERT_EQ(full.size(), 1u);
    EXPECT_EQ(full[0].bbox, (BBox{0, 0, 100, 100}));
    EXPECT_DOUBLE_EQ(full[0].confidence, 1.0);

    const auto q = parse_yolo_labels("0 0.25 0.25 0.5 0.5 0.9", {200, 200});
    ASSERT_EQ(q.size(), 1u);
    EXPECT_NEAR(q[0].bbox.x, 0, 1e-9);
    EXPECT_NEAR(q[0].bbox.w, 100, 1e-9);
    EXPECT_DOUBLE_EQ(q[0].confidence, 0.9);
}

TEST(YoloLabels, ErrorsNameTheLine) {
    try {
        parse_yolo_labels("0 0.5 0.5 0.1 0.1\n0 1.5 0.5 0.1 0.1\n", {10, 10});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_yolo_labels("0 0.5 0.5\n", {10, 10}), ParseError);
    EXPECT_THROW(parse_yolo_labels("0 0.5 0.5 0 0.2\n", {10, 10}), ParseError);
    EXPECT_THROW(parse_yolo_labels("0 0.5 x 0.2 0.2\n", {10, 10}), ParseError);
}

TEST(YoloLabels, RandomRoundTripWithinTolerance) {
    Rng rng(7);
    const ImageSize sz{640, 480};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Detection> dets;
        const int n = static_cast<int>(uniform_index(rng, 6));
        for (int i = 0; i < n; ++i) {
            const double w = uniform_real(rng, 1, 200), h = uniform_real(rng, 1, 200);
            dets.push_back({0, {uniform_real(rng, 0, sz.width - w), uniform_real(rng, 0, sz.height - h), w, h},
                            uniform01(rng), 0});
        }
        const auto back = parse_yolo_labels(format_yolo_labels(dets, sz), sz);
        ASSERT_EQ(back.size(), dets.size());
        for (std::size_t i = 0; i < dets.size(); ++i) {
            EXPECT_NEAR(back[i].bbox.cx() / sz.width, dets[i].bbox.cx() / sz.width, 1e-6);
            EXPECT_NEAR(back[i].bbox.w / sz.width, dets[i].bbox.w / sz.width, 1e-6);
            EXPECT_NEAR(back[i].bbox.h / sz.height, dets[i].bbox.h / sz.height, 1e-6);
            EXPECT_NEAR(back[i].confidence, dets[i].confidence, 1e-6);
        }
        // text -> parse -> text is exact
        const std::string text = format_yolo_labels(dets, sz);
        EXPECT_EQ(format_yolo_labels(parse_yolo_labels(text, sz), sz), text);
    }
}

TEST(InstanceMasks, LosslessRoundTrip) {
    const fs::path d = fresh_dir("masks");
    MaskDataset ds;
    ds.images.push_back({"img0", "img0.png", 10, 10});
    PixelImage m = make_mask({10, 10});
    m.at(1, 1) = 255;
    m.at(2, 1) = 3;  // any nonzero value becomes 255
    m.at(5, 5) = 255;
    m.at(9, 9) = 255;
    ds.instances.push_back({"img0", 1, m, {0, 0, 10, 10}});
    ds.instances.push_back({"img0", 2, make_mask({10, 10}), {2, 2, 3, 3}});
    write_instance_masks(d / "index.json", ds);
    const MaskDataset back = read_instance_masks(d / "index.json");
    ASSERT_EQ(back.instances.size(), 2u);
    EXPECT_EQ(count_set(back.instances[0].mask), 4u);
    EXPECT_EQ(back.instances[0].mask.at(2, 1), 255);
    EXPECT_EQ(back.instances[1].ref_bbox, (BBox{2, 2, 3, 3}));
    EXPECT_TRUE(back.instances[1].is_empty());
    EXPECT_NE(read_text_file(d / "index.json").find("\"empty\": true"), std::string::npos);
}

TEST(InstanceMasks, SizeMismatchNamesBothSizes) {
    const fs::path d = fresh_dir("mismatch");
    MaskDataset ds;
    ds.images.push_back({"img0", "img0.png", 20, 20});
    ds.instances.push_back({"img0", 1, make_mask({20, 20}), {0, 0, 5, 5}});
    write_instance_masks(d / "index.json", ds);
    // Rewrite the index to claim a 10x10 source image.
    std::string text = read_text_file(d / "index.json");
    for (std::size_t p; (p = text.find("20")) != std::string::npos;) text.replace(p, 2, "10");
    write_text_file(d / "index.json", text);
    try {
        read_instance_masks(d / "index.json");
        FAIL();
    } catch (const Error& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("20x20"), std::string::npos) << msg;
        EXPECT_NE(msg.find("10x10"), std::string::npos) << msg;
    }
}
