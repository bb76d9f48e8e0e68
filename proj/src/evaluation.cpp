#include "eavtr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eavtr/captioning.hpp"
#include "eavtr/vocab.hpp"
#include "json.hpp"

using nlohmann::json;

namespace eavtr::evaluation {

RankTable rank_candidates(const Matrix& queries, const Matrix& candidates,
                          const std::vector<int>& ground_truth) {
    if (candidates.rows() == 0) throw DomainError("empty candidate set");
    if (queries.cols() != candidates.cols()) throw DomainError("embedding dim mismatch");
    if (static_cast<Eigen::Index>(ground_truth.size()) != queries.rows())
        throw DomainError("ground truth size mismatch");

    RankTable table;
    const int m = static_cast<int>(candidates.rows());
    for (Eigen::Index q = 0; q < queries.rows(); ++q) {
        Vector scores = candidates * queries.row(q).transpose();
        std::vector<int> order(static_cast<size_t>(m));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (scores[a] != scores[b]) return scores[a] > scores[b];
            return a < b;
        });
        const int gt = ground_truth[static_cast<size_t>(q)];
        if (gt < 0 || gt >= m) throw DomainError("ground truth index out of range");
        int rank = static_cast<int>(std::find(order.begin(), order.end(), gt) - order.begin()) + 1;
        table.sorted_candidates.push_back(std::move(order));
        table.gt_rank.push_back(rank);
    }
    return table;
}

double recall_at_k(const RankTable& table, int k) {
    if (k < 1) throw DomainError("k must be >= 1");
    if (table.gt_rank.empty()) return 0.0;
    int hits = 0;
    for (int r : table.gt_rank) hits += r <= k;
    return static_cast<double>(hits) / static_cast<double>(table.gt_rank.size());
}

double median_rank(const RankTable& table) {
    if (table.gt_rank.empty()) throw DomainError("empty rank table");
    std::vector<int> ranks = table.gt_rank;
    std::sort(ranks.begin(), ranks.end());
    const size_t n = ranks.size();
    if (n % 2 == 1) return ranks[n / 2];
    return 0.5 * (ranks[n / 2 - 1] + ranks[n / 2]);
}

MultiEventResult multi_event_metrics(const std::vector<MultiEventSample>& samples, int k) {
    if (k < 1) throw DomainError("k must be >= 1");
    if (samples.empty()) throw DomainError("no multi-event samples");

    MultiEventResult out;
    bool all_hit_defined = true;
    double all_hit_sum = 0.0;
    for (const auto& sample : samples) {
        const int g = static_cast<int>(sample.gt.size());
        if (g < 1) throw DomainError("sample needs at least one ground-truth caption");
        std::vector<int> order(static_cast<size_t>(sample.scores.size()));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            if (sample.scores[a] != sample.scores[b]) return sample.scores[a] > sample.scores[b];
            return a < b;
        });
        const int top = std::min<int>(k, static_cast<int>(order.size()));
        int matched = 0;
        for (int i = 0; i < top; ++i) {
            if (std::find(sample.gt.begin(), sample.gt.end(), order[static_cast<size_t>(i)]) !=
                sample.gt.end()) {
                ++matched;
            }
        }
        out.average += static_cast<double>(matched) / g;
        out.one_hit += matched >= 1 ? 1.0 : 0.0;
        if (k < g) {
            all_hit_defined = false;  // fewer slots than ground truths: undefined
        } else {
            all_hit_sum += matched == g ? 1.0 : 0.0;
        }
    }
    const double count = static_cast<double>(samples.size());
    out.average /= count;
    out.one_hit /= count;
    if (all_hit_defined) out.all_hit = all_hit_sum / count;
    return out;
}

double temporal_iou(int a_start, int a_end, int b_start, int b_end) {
    if (a_start >= a_end || b_start >= b_end) throw DomainError("empty interval");
    const int inter = std::min(a_end, b_end) - std::max(a_start, b_start);
    if (inter <= 0) return 0.0;
    const int uni = std::max(a_end, b_end) - std::min(a_start, b_start);
    return static_cast<double>(inter) / uni;
}

bool moment_hit(const Matrix& frame_embs, const Vector& query, int gt_start, int gt_end, int n,
                double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("theta must be in (0,1]");
    if (n < 1) throw DomainError("n must be >= 1");
    const int frames = static_cast<int>(frame_embs.rows());
    if (gt_start < 0 || gt_end > frames || gt_start >= gt_end)
        throw DomainError("invalid ground-truth span");

    struct Window {
        int s, e;
        double score;
    };
    std::vector<Window> windows;
    Vector per_frame = frame_embs * query;
    for (int s = 0; s < frames; ++s) {
        double sum = 0.0;
        for (int e = s + 1; e <= frames; ++e) {
            sum += per_frame[e - 1];
            windows.push_back({s, e, sum / (e - s)});
        }
    }
    std::stable_sort(windows.begin(), windows.end(), [](const Window& a, const Window& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.e - a.s != b.e - b.s) return a.e - a.s > b.e - b.s;  // longer first
        return a.s < b.s;
    });
    const int top = std::min<int>(n, static_cast<int>(windows.size()));
    for (int i = 0; i < top; ++i) {
        if (temporal_iou(windows[static_cast<size_t>(i)].s, windows[static_cast<size_t>(i)].e,
                         gt_start, gt_end) >= theta) {
            return true;
        }
    }
    return false;
}

double time_order_consistency(const std::vector<ToTSample>& samples) {
    if (samples.empty()) throw DomainError("no Test-of-Time samples");
    double correct = 0.0;
    for (const auto& s : samples) {
        if (encoder::cosine(s.video, s.correct) > encoder::cosine(s.video, s.swapped)) {
            correct += 1.0;
        }
    }
    return correct / static_cast<double>(samples.size());
}

double top1_accuracy(const Matrix& video_embs, const Matrix& class_embs,
                     const std::vector<int>& labels) {
    if (static_cast<Eigen::Index>(labels.size()) != video_embs.rows())
        throw DomainError("label count mismatch");
    double correct = 0.0;
    for (Eigen::Index i = 0; i < video_embs.rows(); ++i) {
        Vector scores = class_embs * video_embs.row(i).transpose();
        Eigen::Index best = 0;
        scores.maxCoeff(&best);
        if (static_cast<int>(best) == labels[static_cast<size_t>(i)]) correct += 1.0;
    }
    return correct / static_cast<double>(video_embs.rows());
}

// ---------------------------------------------------------------------------
// Protocol drivers
// ---------------------------------------------------------------------------

std::string MetricsReport::to_json() const {
    json j;
    j["task"] = task;
    j["values"] = json::object();
    for (const auto& [k, v] : values) j["values"][k] = v;
    j["absent"] = absent;
    return j.dump(2);
}

std::string MetricsReport::to_csv_row() const {
    std::ostringstream header, row;
    header << "task";
    row << task;
    for (const auto& [k, v] : values) {
        header << ',' << k;
        row << ',' << v;
    }
    for (const auto& k : absent) {
        header << ',' << k;
        row << ',';
    }
    return header.str() + "\n" + row.str() + "\n";
}

std::string dense_caption(const corpus::Video& video) {
    std::string out;
    for (int j = 0; j < video.num_frames(); ++j) {
        if (j > 0) out += std::string(" ") + vocab::kSepToken + " ";
        out += captioning::canonical_caption(video.event_at(j));
    }
    return out;
}

std::pair<std::string, std::string> tot_captions(const corpus::Video& video,
                                                 bool relational_words) {
    if (video.events.size() != 2) throw DomainError("Test of Time needs a two-event video");
    const std::string a = captioning::canonical_caption(video.events[0]);
    const std::string b = captioning::canonical_caption(video.events[1]);
    if (relational_words) {
        // Diagnostic variant only: the default protocol dismantles the
        // relational word and keeps plain temporal concatenation.
        return {a + " before " + b, b + " before " + a};
    }
    const std::string sep = std::string(" ") + vocab::kSepToken + " ";
    return {a + sep + b, b + sep + a};
}

std::string action_prompt(int class_id, const std::string& prompt_template) {
    const std::string phrase = captioning::canonical_caption(corpus::make_event(class_id, 0, 1));
    std::string out = prompt_template;
    const auto pos = out.find("{}");
    if (pos == std::string::npos) throw DomainError("prompt template needs a {} slot");
    return out.replace(pos, 2, phrase);
}

MetricsReport t2v_eval(encoder::DualEncoder& model,
                       const std::vector<const corpus::Video*>& videos) {
    if (videos.empty()) throw DomainError("empty evaluation split");
    const int m = static_cast<int>(videos.size());
    Matrix queries(m, model.config().proj_dim);
    Matrix cands(m, model.config().proj_dim);
    std::vector<int> gt(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        encoder::EmbeddingSet set = model.embed_video(*videos[static_cast<size_t>(i)]);
        cands.row(i) = set.video_embedding().transpose();
        queries.row(i) = model.embed_text(dense_caption(*videos[static_cast<size_t>(i)])).transpose();
        gt[static_cast<size_t>(i)] = i;
    }
    RankTable table = rank_candidates(queries, cands, gt);
    MetricsReport report;
    report.task = "t2v";
    report.values["r1"] = recall_at_k(table, 1);
    report.values["r5"] = recall_at_k(table, 5);
    report.values["r10"] = recall_at_k(table, 10);
    report.values["medr"] = median_rank(table);
    return report;
}

MetricsReport multi_event_eval(encoder::DualEncoder& model,
                               const std::vector<const corpus::Video*>& videos,
                               const std::vector<int>& ks) {
    if (videos.empty()) throw DomainError("empty evaluation split");
    std::vector<std::string> pool;
    std::vector<std::vector<int>> gt_per_video;
    for (const auto* v : videos) {
        std::vector<int> gt;
        for (const auto& e : v->events) {
            gt.push_back(static_cast<int>(pool.size()));
            pool.push_back(captioning::canonical_caption(e));
        }
        gt_per_video.push_back(std::move(gt));
    }
    Matrix pool_embs(static_cast<Eigen::Index>(pool.size()), model.config().proj_dim);
    for (size_t i = 0; i < pool.size(); ++i)
        pool_embs.row(static_cast<Eigen::Index>(i)) = model.embed_text(pool[i]).transpose();

    std::vector<MultiEventSample> samples;
    for (size_t i = 0; i < videos.size(); ++i) {
        encoder::EmbeddingSet set = model.embed_video(*videos[i]);
        MultiEventSample s;
        s.scores = pool_embs * set.video_embedding();
        s.gt = gt_per_video[i];
        samples.push_back(std::move(s));
    }

    MetricsReport report;
    report.task = "mevtr";
    for (int k : ks) {
        MultiEventResult r = multi_event_metrics(samples, k);
        const std::string base = "recall_at_" + std::to_string(k) + "_";
        report.values[base + "average"] = r.average;
        report.values[base + "one_hit"] = r.one_hit;
        if (r.all_hit) {
            report.values[base + "all_hit"] = *r.all_hit;
        } else {
            report.absent.push_back(base + "all_hit");
        }
    }
    return report;
}

MetricsReport moment_eval(encoder::DualEncoder& model,
                          const std::vector<const corpus::Video*>& videos,
                          const std::vector<int>& ns, const std::vector<double>& thetas) {
    if (videos.empty()) throw DomainError("empty evaluation split");
    struct Query {
        Matrix frames;
        Vector text;
        int s, e;
    };
    std::vector<Query> queries;
    for (const auto* v : videos) {
        encoder::EmbeddingSet set = model.embed_video(*v);
        for (const auto& event : v->events) {
            Query q;
            q.frames = set.frame_embeddings();
            q.text = model.embed_text(captioning::canonical_caption(event));
            q.s = event.start;
            q.e = event.end;
            queries.push_back(std::move(q));
        }
    }
    MetricsReport report;
    report.task = "moment";
    for (int n : ns) {
        for (double theta : thetas) {
            double hits = 0.0;
            for (const auto& q : queries) {
                hits += moment_hit(q.frames, q.text, q.s, q.e, n, theta) ? 1.0 : 0.0;
            }
            std::ostringstream key;
            key << "r" << n << "_iou" << theta;
            report.values[key.str()] = hits / static_cast<double>(queries.size());
        }
    }
    return report;
}

MetricsReport tot_eval(encoder::DualEncoder& model,
                       const std::vector<const corpus::Video*>& videos, bool relational_words) {
    std::vector<ToTSample> samples;
    for (const auto* v : videos) {
        if (v->events.size() != 2) continue;
        auto [correct, swapped] = tot_captions(*v, relational_words);
        encoder::EmbeddingSet set = model.embed_video(*v);
        ToTSample s;
        s.video = set.video_embedding();
        s.correct = model.embed_text(correct);
        s.swapped = model.embed_text(swapped);
        samples.push_back(std::move(s));
    }
    if (samples.empty()) throw DomainError("no two-event videos in evaluation split");
    MetricsReport report;
    report.task = "tot";
    report.values["consistency"] = time_order_consistency(samples);
    report.values["samples"] = static_cast<double>(samples.size());
    return report;
}

MetricsReport action_recognition_eval(encoder::DualEncoder& model,
                                      const std::vector<const corpus::Video*>& videos,
                                      int class_count, const std::string& prompt_template) {
    Matrix class_embs(class_count, model.config().proj_dim);
    for (int c = 0; c < class_count; ++c) {
        class_embs.row(c) = model.embed_text(action_prompt(c, prompt_template)).transpose();
    }
    std::vector<const corpus::Video*> singles;
    for (const auto* v : videos) {
        if (v->events.size() == 1) singles.push_back(v);
    }
    if (singles.empty()) throw DomainError("no single-event videos for action recognition");
    Matrix video_embs(static_cast<Eigen::Index>(singles.size()), model.config().proj_dim);
    std::vector<int> labels;
    for (size_t i = 0; i < singles.size(); ++i) {
        if (singles[i]->events[0].class_id >= class_count)
            throw DomainError("video class outside prompt class set");
        encoder::EmbeddingSet set = model.embed_video(*singles[i]);
        video_embs.row(static_cast<Eigen::Index>(i)) = set.video_embedding().transpose();
        labels.push_back(singles[i]->events[0].class_id);
    }
    MetricsReport report;
    report.task = "actrec";
    report.values["top1"] = top1_accuracy(video_embs, class_embs, labels);
    report.values["samples"] = static_cast<double>(singles.size());
    return report;
}

}  // namespace eavtr::evaluation
