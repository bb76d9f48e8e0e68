#include "eavtr/captioning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eavtr/vocab.hpp"

namespace eavtr::captioning {

void VocabDistribution::validate() const {
    if (tokens.empty()) throw DomainError("empty vocabulary distribution");
    if (tokens.size() != probabilities.size()) throw DomainError("token/probability size mismatch");
    double sum = 0;
    for (double p : probabilities) {
        if (p < 0) throw DomainError("negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DomainError("probabilities must sum to 1");
}

int top_p_sample_index(const VocabDistribution& dist, double p, Rng& rng) {
    dist.validate();
    if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must be in (0,1]");

    std::vector<int> order(dist.tokens.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (dist.probabilities[a] != dist.probabilities[b])
            return dist.probabilities[a] > dist.probabilities[b];
        return a < b;
    });

    size_t nucleus = 0;
    double mass = 0;
    while (nucleus < order.size()) {
        mass += dist.probabilities[order[nucleus]];
        ++nucleus;
        if (mass >= p - 1e-12) break;
    }

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng) * mass;
    double cum = 0;
    for (size_t i = 0; i < nucleus; ++i) {
        cum += dist.probabilities[order[i]];
        if (u < cum) return order[i];
    }
    return order[nucleus - 1];
}

std::string top_p_sample(const VocabDistribution& dist, double p, Rng& rng) {
    return dist.tokens[static_cast<size_t>(top_p_sample_index(dist, p, rng))];
}

namespace {

// Every synonym pool shares the same head-heavy shape so that argmax decoding
// (p -> 0) always yields the canonical word.
const std::vector<double> kPoolProbs = {0.5, 0.3, 0.2};

template <typename Pools>
VocabDistribution pool_distribution(const Pools& pools, int id) {
    VocabDistribution d;
    for (const char* w : pools.at(static_cast<size_t>(id))) d.tokens.emplace_back(w);
    d.probabilities = kPoolProbs;
    return d;
}

}  // namespace

std::string canonical_caption(const corpus::EventSpec& event) {
    std::ostringstream out;
    out << "a " << vocab::canonical_color_word(event.color_id) << ' '
        << vocab::canonical_shape_word(event.shape_id) << ' '
        << vocab::canonical_motion_word(event.motion_id);
    return out.str();
}

std::string OracleCaptioner::describe(const corpus::Frame& frame,
                                      const std::optional<corpus::EventSpec>& ground_truth_hint,
                                      Rng& rng) const {
    if (!ground_truth_hint) throw DomainError("oracle captioner requires a ground-truth event");
    const auto& event = *ground_truth_hint;
    if (!event.covers(frame.frame_index)) {
        throw DomainError("event span does not cover frame " + std::to_string(frame.frame_index));
    }
    std::ostringstream out;
    out << "a " << top_p_sample(pool_distribution(vocab::color_pools(), event.color_id), top_p_, rng)
        << ' ' << top_p_sample(pool_distribution(vocab::shape_pools(), event.shape_id), top_p_, rng)
        << ' ' << top_p_sample(pool_distribution(vocab::motion_pools(), event.motion_id), top_p_, rng);
    return out.str();
}

std::optional<ClassTriple> invert_caption(const std::string& text) {
    ClassTriple triple;
    std::istringstream in(text);
    std::string word;
    while (in >> word) {
        for (int c = 0; c < corpus::kNumColors; ++c)
            for (const char* w : vocab::color_pools()[c])
                if (word == w) triple.color_id = c;
        for (int s = 0; s < corpus::kNumShapes; ++s)
            for (const char* w : vocab::shape_pools()[s])
                if (word == w) triple.shape_id = s;
        for (int m = 0; m < corpus::kNumMotions; ++m)
            for (const char* w : vocab::motion_pools()[m])
                if (word == w) triple.motion_id = m;
    }
    if (triple.color_id < 0 || triple.shape_id < 0 || triple.motion_id < 0) return std::nullopt;
    return triple;
}

std::vector<FrameCaption> eca_augment(const corpus::Video& video, const Captioner& captioner,
                                      Rng& rng) {
    std::vector<FrameCaption> captions;
    for (int j = 0; j < video.num_frames(); ++j) {
        try {
            FrameCaption fc;
            fc.video_id = video.video_id;
            fc.frame_index = j;
            fc.text = captioner.describe(video.frames[static_cast<size_t>(j)],
                                         video.event_at(j), rng);
            if (fc.text.empty()) throw DomainError("captioner produced empty text");
            captions.push_back(std::move(fc));
        } catch (const std::exception& e) {
            throw DomainError("captioning failed at frame " + std::to_string(j) + " of " +
                              video.video_id + ": " + e.what());
        }
    }
    return captions;
}

std::vector<std::vector<FrameCaption>> eca_augment_corpus(
    const std::vector<const corpus::Video*>& videos, const Captioner& captioner,
    std::uint64_t seed) {
    std::vector<std::vector<FrameCaption>> out;
    out.reserve(videos.size());
    for (size_t i = 0; i < videos.size(); ++i) {
        Rng rng = make_rng(seed, 0xeca000 + i);
        out.push_back(eca_augment(*videos[i], captioner, rng));
    }
    return out;
}

}  // namespace eavtr::captioning
