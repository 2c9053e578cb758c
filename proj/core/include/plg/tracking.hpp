#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "plg/consistency.hpp"
#include "plg/detection.hpp"
#include "plg/features.hpp"
#include "plg/image.hpp"
#include "plg/pseudolabel.hpp"

namespace plg {

enum class ObsSource { Detected, Predicted };
enum class TrackState { Tentative, Active, Lost, Terminated };

struct Observation {
    int frame = 0;
    BBox bbox;
    ObsSource source = ObsSource::Detected;
    friend bool operator==(const Observation&, const Observation&) = default;
};

struct Track {
    int id = 0;
    std::vector<Observation> observations;  ///< strictly increasing frames
    TrackState state = TrackState::Active;
    int miss_count = 0;

    std::size_t detected_count() const noexcept;
    friend bool operator==(const Track& a, const Track& b) { return a.id == b.id && a.observations == b.observations; }
};

struct SfmTrackerParams {
    double v_min = 0.5;     ///< minimum fraction of the track's matches landing in a detection
    int max_miss = 5;
    int min_votes = 3;      ///< matches needed inside the last box for feature voting
    double fallback_iou = 0.5;  ///< IoU gate used when a track has too few matches
    TransferParams transfer;    ///< propagation of missed tracks
};

/// Feature-link tracker. Detections of frame t are associated to the tracks
/// alive at t-1 by the fraction of verified t-1 -> t matches starting inside
/// the track's last box that end inside the detection; assignment is greedy by
/// decreasing vote. Missed tracks are carried forward through the matches
/// (predicted observations) until they exceed max_miss. Tracks with too few
/// matches fall back to an IoU gate against their last box; tracks whose vote
/// fails may still take a leftover detection through that gate.
std::vector<Track> track_sfm(std::span<const FeatureSet> features, std::span<const std::vector<Detection>> dets,
                             const GeometryConfig& geometry, const SfmTrackerParams& params = {});

struct KalmanTrackerParams {
    double iou_min = 0.3;
    bool appearance_gate = false;
    double appearance_max_dist = 0.4;  ///< cosine distance between RGB histograms
    int hist_bins = 32;
    int n_init = 3;
    int max_miss = 5;
};

/// Kalman + IoU tracker. Per frame: constant-velocity prediction, Hungarian
/// assignment on 1 - IoU, pairs below iou_min (or failing the appearance
/// gate) rejected. Tentative tracks need n_init consecutive hits and are
/// dropped on their first miss; IDs are given at confirmation. `frames` is
/// needed only with the appearance gate.
std::vector<Track> track_kalman_iou(std::span<const std::vector<Detection>> dets, const KalmanTrackerParams& params = {},
                                    std::span<const PixelImage> frames = {});

/// Concatenated per-channel histograms (3 * bins values) of the box pixels.
std::vector<double> rgb_histogram(const PixelImage& image, const BBox& box, int bins = 32);
double cosine_distance(std::span<const double> a, std::span<const double> b);

// tracks.json: [{"id": n, "obs": [{"frame": f, "bbox": [x, y, w, h], "source": "detected"}]}]
std::string tracks_to_json(std::span<const Track> tracks);
std::vector<Track> tracks_from_json(std::string_view text);
void write_tracks(const std::filesystem::path& path, std::span<const Track> tracks);
std::vector<Track> read_tracks(const std::filesystem::path& path);

const char* to_string(ObsSource s) noexcept;

}  // namespace plg
