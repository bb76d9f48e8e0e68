#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eavtr/encoder.hpp"

namespace eavtr::evaluation {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Rank-based retrieval
// ---------------------------------------------------------------------------

struct RankTable {
    std::vector<std::vector<int>> sorted_candidates;  // per query, best first
    std::vector<int> gt_rank;                         // 1-based rank of ground truth
};

// Descending cosine; ties broken by ascending candidate index.
RankTable rank_candidates(const Matrix& queries, const Matrix& candidates,
                          const std::vector<int>& ground_truth);

double recall_at_k(const RankTable& table, int k);
double median_rank(const RankTable& table);

// ---------------------------------------------------------------------------
// Multi-event retrieval
// ---------------------------------------------------------------------------

struct MultiEventSample {
    Vector scores;        // similarity of this video to every pool caption
    std::vector<int> gt;  // pool indices of the video's G ground-truth captions
};

struct MultiEventResult {
    double average = 0.0;
    double one_hit = 0.0;
    std::optional<double> all_hit;  // absent when k < G for some video
};

MultiEventResult multi_event_metrics(const std::vector<MultiEventSample>& samples, int k);

// ---------------------------------------------------------------------------
// Moment retrieval
// ---------------------------------------------------------------------------

double temporal_iou(int a_start, int a_end, int b_start, int b_end);

// Sliding windows [s, e), 1 <= e-s <= N, scored by mean frame-query cosine;
// top-n ties prefer the longer window, then the smaller start.
bool moment_hit(const Matrix& frame_embs, const Vector& query, int gt_start, int gt_end, int n,
                double theta);

// ---------------------------------------------------------------------------
// Test of Time
// ---------------------------------------------------------------------------

struct ToTSample {
    Vector video;
    Vector correct;
    Vector swapped;
};

// Correct iff cosine(video, correct) strictly exceeds cosine(video, swapped);
// ties count against the model.
double time_order_consistency(const std::vector<ToTSample>& samples);

// ---------------------------------------------------------------------------
// Action recognition
// ---------------------------------------------------------------------------

// Prediction is the argmax class-prompt cosine; returns top-1 accuracy.
double top1_accuracy(const Matrix& video_embs, const Matrix& class_embs,
                     const std::vector<int>& labels);

// ---------------------------------------------------------------------------
// Protocol drivers over a trained model and a test split
// ---------------------------------------------------------------------------

struct MetricsReport {
    std::map<std::string, double> values;  // flat metric name -> value
    std::vector<std::string> absent;       // metrics reported as undefined
    std::string task;

    std::string to_json() const;
    std::string to_csv_row() const;  // header line + value line
};

// Event-dense text query: the canonical caption of every frame's covering
// event, joined in temporal order by [SEP] (paragraph-style query).
std::string dense_caption(const corpus::Video& video);

// Two-event clause pair in true and swapped order, [SEP]-joined, no
// relational words.
std::pair<std::string, std::string> tot_captions(const corpus::Video& video,
                                                 bool relational_words = false);

inline constexpr const char* kActionPromptTemplate = "a video of {}";
std::string action_prompt(int class_id, const std::string& prompt_template = kActionPromptTemplate);

MetricsReport t2v_eval(encoder::DualEncoder& model, const std::vector<const corpus::Video*>& videos);
MetricsReport multi_event_eval(encoder::DualEncoder& model,
                               const std::vector<const corpus::Video*>& videos,
                               const std::vector<int>& ks = {1, 5, 10, 50});
MetricsReport moment_eval(encoder::DualEncoder& model,
                          const std::vector<const corpus::Video*>& videos,
                          const std::vector<int>& ns = {1, 5},
                          const std::vector<double>& thetas = {0.5, 0.7});
MetricsReport tot_eval(encoder::DualEncoder& model,
                       const std::vector<const corpus::Video*>& videos,
                       bool relational_words = false);
MetricsReport action_recognition_eval(encoder::DualEncoder& model,
                                      const std::vector<const corpus::Video*>& videos,
                                      int class_count,
                                      const std::string& prompt_template = kActionPromptTemplate);

}  // namespace eavtr::evaluation
