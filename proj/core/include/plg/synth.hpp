#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "plg/detection.hpp"
#include "plg/image.hpp"
#include "plg/tracking.hpp"

namespace plg {

enum class MotionKind { Linear, Sinusoidal };

struct SynthObject {
    double x = 0, y = 0;    ///< world position of the ellipse center at frame 0
    double rx = 20, ry = 26;
    std::array<std::uint8_t, 3> color{90, 140, 60};
    MotionKind motion = MotionKind::Linear;
    double vx = 0, vy = 0;  ///< linear: px/frame; sinusoidal: amplitude in px
    double period = 20;     ///< sinusoidal only, frames
};

/// Frames [begin, end) during which an object is hidden behind foliage.
struct Occlusion {
    int object = 0;
    int begin = 0;
    int end = 0;
};

struct SynthScenario {
    std::uint64_t seed = 0;
    int n_frames = 10;
    int width = 320;
    int height = 240;
    double pan_x = 0, pan_y = 0;  ///< camera motion, px/frame
    std::vector<SynthObject> objects;
    std::vector<Occlusion> occlusions;
    double min_visible = 0.5;  ///< box fraction inside the frame for an object to count
    int texture_cell = 12;
    bool with_masks = true;
};

struct SynthSequence {
    std::vector<PixelImage> frames;
    std::vector<std::vector<Detection>> gt_dets;  ///< per frame, class 0, confidence 1
    std::vector<std::vector<int>> gt_ids;         ///< track id of each gt_dets entry
    std::vector<Track> gt_tracks;                 ///< id = object index + 1
    std::vector<std::vector<PixelImage>> gt_masks;  ///< per frame, parallel to gt_dets
    std::vector<Occlusion> occlusions;
};

/// Deterministic renderer: textured foliage panning under the camera with
/// textured elliptical bunches on top. GT boxes are the analytic ellipse
/// bounds clipped to the frame; masks are exact (later objects hide earlier
/// ones). Throws on objects larger than the frame.
SynthSequence synth_generate(const SynthScenario& sc);

/// Named presets: "easy", "skiptrend", "occlusion", "crossing", "hd".
SynthScenario make_scenario(const std::string& preset, std::uint64_t seed);

/// Random non-overlapping objects spread over the area swept by the pan.
SynthScenario random_scenario(int n_objects, int n_frames, int width, int height, double pan_x, double pan_y,
                              std::uint64_t seed);

struct DetectorNoise {
    double box_sigma = 0.0;  ///< jitter std-dev as a fraction of box size
    double miss_rate = 0.0;
    double fp_rate = 0.0;    ///< expected false positives per frame
    double conf_lo = 0.6, conf_hi = 1.0;
    std::uint64_t seed = 0;
};

/// Simulated detector over ground truth.
std::vector<std::vector<Detection>> simulate_detector(const SynthSequence& seq, const DetectorNoise& noise);

/// frames/frame_NNNN.png, gt/labels/frame_NNNN.txt, gt/tracks.json and,
/// with masks, gt/masks/index.json.
void write_synth(const std::filesystem::path& dir, const SynthSequence& seq);

std::string frame_stem(int index);

}  // namespace plg
