#pragma once

#include <functional>
#include <string>
#include <vector>

#include "eavtr/captioning.hpp"
#include "eavtr/common.hpp"
#include "eavtr/corpus.hpp"

namespace eavtr::eventaug {

enum class Scheme { WeightedSum, Concat };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct SourceRef {
    std::string video_id;
    int frame_count = 0;  // M
    int start = 0;        // first intercepted frame index
};

struct SynthPair {
    std::vector<corpus::Frame> frames;  // length N
    std::string caption;
    SourceRef source1;
    SourceRef source2;
    Scheme scheme = Scheme::Concat;
};

// Strictly non-increasing blend weights with pure endpoints w_1 = 1, w_N = 0.
struct WeightSchedule {
    std::vector<double> weights;

    static WeightSchedule linear(int n);
    void validate() const;
};

struct MiningVerdict {
    std::string video_id;
    double min_similarity = 1.0;
    bool is_single_event = true;
    double threshold = 0.85;
};

using FrameEncoder = std::function<std::vector<double>(const corpus::Frame&)>;

// L2-normalized flattened pixels; the default miner encoder.
FrameEncoder pixel_frame_encoder();

struct InterceptResult {
    std::vector<corpus::Frame> frames;
    std::vector<captioning::FrameCaption> captions;
    int start = 0;
};

// M consecutive frames (uniform start) with their index-aligned captions.
InterceptResult intercept_consecutive(const corpus::Video& video,
                                      const std::vector<captioning::FrameCaption>& frame_captions,
                                      int m, Rng& rng);

// Pixel-wise blend: frame j = w_j * f1_j + (1 - w_j) * f2_j.
std::vector<corpus::Frame> synthesize_weighted_sum(const std::vector<corpus::Frame>& f1,
                                                   const std::vector<corpus::Frame>& f2,
                                                   const WeightSchedule& w);

// Temporal concatenation; both sources must contribute at least one frame.
std::vector<corpus::Frame> synthesize_concat(const std::vector<corpus::Frame>& f1,
                                             const std::vector<corpus::Frame>& f2,
                                             int expected_total);

// One caption drawn from each source list, joined in temporal order by [SEP].
std::string synthesize_caption(const std::vector<captioning::FrameCaption>& t1,
                               const std::vector<captioning::FrameCaption>& t2, Rng& rng);

// Pairs distinct batch videos without replacement; one SynthPair per pair.
std::vector<SynthPair> eta_batch(const std::vector<const corpus::Video*>& batch,
                                 const std::vector<std::vector<captioning::FrameCaption>>& captions,
                                 Scheme scheme, Rng& rng);

// Single-event mining rule: a video is single-event iff
// min_k cosine(f_1, f_k) >= tau over K uniformly spaced frames.
MiningVerdict mine_single_event(const corpus::Video& video, int k, double tau,
                                const FrameEncoder& encoder);

}  // namespace eavtr::eventaug
