#include "eavtr/eventaug.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eavtr::eventaug {

std::string scheme_name(Scheme s) {
    return s == Scheme::Concat ? "concat" : "wsum";
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "concat") return Scheme::Concat;
    if (name == "wsum") return Scheme::WeightedSum;
    throw DomainError("unknown ETA scheme: " + name);
}

WeightSchedule WeightSchedule::linear(int n) {
    if (n < 2) throw DomainError("weight schedule needs at least 2 frames");
    WeightSchedule w;
    for (int j = 0; j < n; ++j) {
        w.weights.push_back(static_cast<double>(n - 1 - j) / (n - 1));
    }
    return w;
}

void WeightSchedule::validate() const {
    if (weights.size() < 2) throw DomainError("weight schedule too short");
    if (weights.front() != 1.0 || weights.back() != 0.0)
        throw DomainError("weight schedule endpoints must be 1 and 0");
    for (size_t j = 0; j + 1 < weights.size(); ++j) {
        if (weights[j] < weights[j + 1]) throw DomainError("weights must be non-increasing");
        if (weights[j] < 0.0 || weights[j] > 1.0) throw DomainError("weights must be in [0,1]");
    }
}

FrameEncoder pixel_frame_encoder() {
    return [](const corpus::Frame& f) {
        std::vector<double> v(f.pixels.begin(), f.pixels.end());
        double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (norm > 0) {
            for (double& x : v) x /= norm;
        }
        return v;
    };
}

InterceptResult intercept_consecutive(const corpus::Video& video,
                                      const std::vector<captioning::FrameCaption>& frame_captions,
                                      int m, Rng& rng) {
    const int n = video.num_frames();
    if (m < 1 || m > n) throw DomainError("intercept length M out of range");
    if (static_cast<int>(frame_captions.size()) != n)
        throw DomainError("frame captions not aligned with video frames");
    std::uniform_int_distribution<int> pick(0, n - m);
    InterceptResult out;
    out.start = pick(rng);
    for (int j = out.start; j < out.start + m; ++j) {
        out.frames.push_back(video.frames[static_cast<size_t>(j)]);
        out.captions.push_back(frame_captions[static_cast<size_t>(j)]);
    }
    return out;
}

std::vector<corpus::Frame> synthesize_weighted_sum(const std::vector<corpus::Frame>& f1,
                                                   const std::vector<corpus::Frame>& f2,
                                                   const WeightSchedule& w) {
    w.validate();
    if (f1.size() != f2.size() || f1.size() != w.weights.size())
        throw DomainError("weighted sum requires M1 = M2 = N frames");
    std::vector<corpus::Frame> out;
    for (size_t j = 0; j < f1.size(); ++j) {
        if (f1[j].pixels.size() != f2[j].pixels.size())
            throw DomainError("frame shape mismatch in weighted sum");
        corpus::Frame blended = f1[j];
        blended.frame_index = static_cast<int>(j);
        const double wj = w.weights[j];
        if (wj == 1.0) {
            // endpoint purity: bit-identical source frame
        } else if (wj == 0.0) {
            blended.pixels = f2[j].pixels;
        } else {
            for (size_t p = 0; p < blended.pixels.size(); ++p) {
                blended.pixels[p] = static_cast<float>(wj * f1[j].pixels[p] +
                                                       (1.0 - wj) * f2[j].pixels[p]);
            }
        }
        out.push_back(std::move(blended));
    }
    return out;
}

std::vector<corpus::Frame> synthesize_concat(const std::vector<corpus::Frame>& f1,
                                             const std::vector<corpus::Frame>& f2,
                                             int expected_total) {
    if (f1.empty() || f2.empty())
        throw DomainError("each concat source must contribute at least one frame");
    if (static_cast<int>(f1.size() + f2.size()) != expected_total)
        throw DomainError("concat requires M1 + M2 = N");
    std::vector<corpus::Frame> out;
    for (const auto& f : f1) out.push_back(f);
    for (const auto& f : f2) out.push_back(f);
    for (size_t j = 0; j < out.size(); ++j) out[j].frame_index = static_cast<int>(j);
    return out;
}

std::string synthesize_caption(const std::vector<captioning::FrameCaption>& t1,
                               const std::vector<captioning::FrameCaption>& t2, Rng& rng) {
    if (t1.empty() || t2.empty()) throw DomainError("caption lists must be non-empty");
    std::uniform_int_distribution<size_t> pick1(0, t1.size() - 1);
    std::uniform_int_distribution<size_t> pick2(0, t2.size() - 1);
    return t1[pick1(rng)].text + " [SEP] " + t2[pick2(rng)].text;
}

std::vector<SynthPair> eta_batch(const std::vector<const corpus::Video*>& batch,
                                 const std::vector<std::vector<captioning::FrameCaption>>& captions,
                                 Scheme scheme, Rng& rng) {
    if (batch.size() < 2) throw DomainError("ETA needs a batch of at least 2 videos");
    if (captions.size() != batch.size()) throw DomainError("captions not aligned with batch");

    std::vector<size_t> order(batch.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<SynthPair> pairs;
    for (size_t p = 0; p + 1 < order.size(); p += 2) {
        size_t a = order[p];
        size_t b = order[p + 1];
        const corpus::Video& v1 = *batch[a];
        const corpus::Video& v2 = *batch[b];
        const int n = v1.num_frames();
        if (v2.num_frames() != n) throw DomainError("ETA sources must share frame count");

        SynthPair sp;
        sp.scheme = scheme;
        int m1 = n, m2 = n;
        if (scheme == Scheme::Concat) {
            std::uniform_int_distribution<int> pick(1, n - 1);
            m1 = pick(rng);
            m2 = n - m1;
        }
        InterceptResult r1 = intercept_consecutive(v1, captions[a], m1, rng);
        InterceptResult r2 = intercept_consecutive(v2, captions[b], m2, rng);
        if (scheme == Scheme::Concat) {
            sp.frames = synthesize_concat(r1.frames, r2.frames, n);
        } else {
            sp.frames = synthesize_weighted_sum(r1.frames, r2.frames, WeightSchedule::linear(n));
        }
        sp.caption = synthesize_caption(r1.captions, r2.captions, rng);
        sp.source1 = {v1.video_id, m1, r1.start};
        sp.source2 = {v2.video_id, m2, r2.start};
        pairs.push_back(std::move(sp));
    }
    return pairs;
}

MiningVerdict mine_single_event(const corpus::Video& video, int k, double tau,
                                const FrameEncoder& encoder) {
    const int n = video.num_frames();
    if (k < 2) throw DomainError("mining needs K >= 2");
    if (k > n) throw DomainError("K exceeds available frames");

    // K uniformly spaced frame indices including the endpoints.
    std::vector<int> indices;
    for (int i = 0; i < k; ++i) {
        indices.push_back(k == 1 ? 0 : static_cast<int>(std::llround(
                                           static_cast<double>(i) * (n - 1) / (k - 1))));
    }

    std::vector<double> first = encoder(video.frames[static_cast<size_t>(indices[0])]);
    MiningVerdict verdict;
    verdict.video_id = video.video_id;
    verdict.threshold = tau;
    verdict.min_similarity = 1.0;
    for (int i = 1; i < k; ++i) {
        std::vector<double> fk = encoder(video.frames[static_cast<size_t>(indices[i])]);
        if (fk.size() != first.size()) throw DomainError("frame encoder dimension mismatch");
        // identical embeddings have cosine exactly 1; skip the rounding of the dot product
        double s = fk == first ? 1.0
                               : std::inner_product(first.begin(), first.end(), fk.begin(), 0.0);
        verdict.min_similarity = std::min(verdict.min_similarity, s);
    }
    verdict.is_single_event = verdict.min_similarity >= tau;
    return verdict;
}

}  // namespace eavtr::eventaug
