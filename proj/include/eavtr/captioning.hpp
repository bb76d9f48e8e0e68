#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eavtr/common.hpp"
#include "eavtr/corpus.hpp"

namespace eavtr::captioning {

struct VocabDistribution {
    std::vector<std::string> tokens;
    std::vector<double> probabilities;

    void validate() const;
};

struct FrameCaption {
    std::string video_id;
    int frame_index = 0;
    std::string text;
};

// Nucleus sampling: restrict to the smallest probability-sorted prefix with
// cumulative mass >= p, renormalize, sample.  Ties broken by ascending index.
int top_p_sample_index(const VocabDistribution& dist, double p, Rng& rng);
std::string top_p_sample(const VocabDistribution& dist, double p, Rng& rng);

// Captioner interface; implementations must be deterministic given rng.
class Captioner {
  public:
    virtual ~Captioner() = default;
    virtual std::string describe(const corpus::Frame& frame,
                                 const std::optional<corpus::EventSpec>& ground_truth_hint,
                                 Rng& rng) const = 0;
};

// Ground-truth captioner over the synthetic palettes.  Fills a fixed 4-slot
// template "a {color} {shape} {motion}" with Top-p sampled synonyms.
class OracleCaptioner : public Captioner {
  public:
    explicit OracleCaptioner(double top_p = 0.9) : top_p_(top_p) {}

    std::string describe(const corpus::Frame& frame,
                         const std::optional<corpus::EventSpec>& ground_truth_hint,
                         Rng& rng) const override;

  private:
    double top_p_;
};

// Argmax decoding of the oracle template (the p -> 0 caption).
std::string canonical_caption(const corpus::EventSpec& event);

struct ClassTriple {
    int color_id = -1;
    int shape_id = -1;
    int motion_id = -1;
    bool operator==(const ClassTriple&) const = default;
};

// Synonym inversion: recovers the (color, shape, motion) triple named by a
// caption, or nullopt if any attribute is missing.
std::optional<ClassTriple> invert_caption(const std::string& text);

// ECA: one caption per frame, index-aligned.  Captioner failures are
// re-thrown with the frame index attached.
std::vector<FrameCaption> eca_augment(const corpus::Video& video, const Captioner& captioner,
                                      Rng& rng);

// Fixed per-epoch caption pool for a whole corpus (one caption per frame),
// keyed by (seed, epoch).
std::vector<std::vector<FrameCaption>> eca_augment_corpus(
    const std::vector<const corpus::Video*>& videos, const Captioner& captioner,
    std::uint64_t seed);

}  // namespace eavtr::captioning
