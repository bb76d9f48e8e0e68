#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eavtr/common.hpp"

namespace eavtr::corpus {

// Closed rendering palettes. An event class is a (color, shape, motion)
// triple derived deterministically from class_id.
inline constexpr int kNumColors = 8;
inline constexpr int kNumShapes = 4;
inline constexpr int kNumMotions = 6;
inline constexpr int kDefaultFrameSize = 32;
inline constexpr int kChannels = 3;

struct EventSpec {
    int class_id = 0;
    int color_id = 0;
    int shape_id = 0;
    int motion_id = 0;
    int start = 0;  // half-open frame interval [start, end)
    int end = 0;

    bool covers(int frame_index) const { return start <= frame_index && frame_index < end; }
};

// Derives the palette triple for a class id.
EventSpec make_event(int class_id, int start, int end);

struct Frame {
    std::vector<float> pixels;  // H*W*3 row-major, values in [0,1]
    int height = kDefaultFrameSize;
    int width = kDefaultFrameSize;
    int frame_index = 0;

    float& at(int y, int x, int c) { return pixels[(y * width + x) * kChannels + c]; }
    float at(int y, int x, int c) const { return pixels[(y * width + x) * kChannels + c]; }
};

struct Video {
    std::string video_id;
    std::vector<Frame> frames;
    std::string web_caption;
    std::vector<EventSpec> events;

    // Ground-truth event covering frame j; throws if spans do not cover j.
    const EventSpec& event_at(int frame_index) const;
    int num_frames() const { return static_cast<int>(frames.size()); }
};

struct CorpusSpec {
    int num_videos = 64;
    int frames_per_video = 4;
    double two_event_prob = 0.5;  // events per video drawn from {1, 2}
    int class_count = 8;
    double noise_sigma = 0.02;
    int frame_size = kDefaultFrameSize;
    std::uint64_t seed = 0;

    void validate() const;
};

struct ManifestEntry {
    std::string video_id;
    std::string blob_path;  // relative to the manifest file
    std::string caption;
    std::vector<EventSpec> events;
    std::string split;  // "", "train", "val" or "test"
};

struct CorpusManifest {
    std::string version = "eavtr-corpus-v1";
    std::vector<ManifestEntry> entries;
};

// Phase of frame j inside event: 0 at span start, 1 at span end (0 for
// single-frame spans).
double event_phase(const EventSpec& event, int frame_index);

// Deterministic moving-pattern renderer. Gaussian pixel noise is drawn from
// rng and clamped back into [0,1].
Frame render_frame(const EventSpec& event, double phase, double noise_sigma, Rng& rng,
                   int frame_size = kDefaultFrameSize);

// Cosine similarity of flattened pixels.
double pixel_cosine(const Frame& a, const Frame& b);

struct Corpus {
    std::vector<Video> videos;
    CorpusManifest manifest;

    const Video& by_id(const std::string& video_id) const;
    std::vector<const Video*> split(const std::string& tag) const;
};

Corpus generate_corpus(const CorpusSpec& spec);

// Builds one video directly from its event list (used by tests and the
// miner's constructed inputs).
Video make_video(const std::string& video_id, const std::vector<EventSpec>& events,
                 int frames_per_video, double noise_sigma, std::uint64_t seed,
                 int frame_size = kDefaultFrameSize);

// Assigns split tags in-place as a pure function of (entry order, seed).
void split_corpus(CorpusManifest& manifest, double train_frac, double val_frac,
                  double test_frac, std::uint64_t seed);

// Manifest JSON + one frame blob per video.  Blob layout: 16-byte header
// (magic u32, H u32, W u32, C u32), N frames of little-endian float32
// row-major pixels, trailing CRC32 over header+payload.
void write_manifest(const Corpus& corpus, const std::string& dir);
Corpus read_manifest(const std::string& dir);

std::vector<float> read_frame_blob(const std::string& path, int& height, int& width,
                                   int& frames_out);

}  // namespace eavtr::corpus
