#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "eavtr/common.hpp"

namespace eavtr::losses {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Temperatures {
    double ecl = 0.07;
    double etl = 0.07;
    double vta = 0.05;
};

// Similarity matrix with one registered positive key per query row.
struct SimilarityMatrix {
    Matrix s;
    std::vector<int> positive;

    void validate() const;
};

struct InfoNceResult {
    Vector per_query;  // -log softmax(positive) per query row
    Matrix d_sim;      // gradient of sum(per_query) w.r.t. s
};

// Max-subtraction stabilized InfoNCE over similarity rows.
InfoNceResult info_nce(const SimilarityMatrix& sim, double tau);

struct LossGrad {
    double value = 0.0;
    Matrix d_a;  // gradient w.r.t. the first embedding set
    Matrix d_b;  // gradient w.r.t. the second embedding set
};

// Frame-caption alignment: symmetric InfoNCE over all B*N (frame, caption)
// pairs with the denominator running over both batch and frame indices.
LossGrad ecl_loss(const Matrix& frame_embs, const Matrix& text_embs, int batch, int frames,
                  double tau, const char* tag_a = nullptr, const char* tag_b = nullptr);

// Synthesized-pair alignment: symmetric batch-level InfoNCE.
LossGrad etl_loss(const Matrix& video_embs, const Matrix& caption_embs, double tau,
                  const char* tag_a = nullptr, const char* tag_b = nullptr);

// Original-pair alignment; identical form to etl_loss at its own temperature.
LossGrad vta_loss(const Matrix& video_embs, const Matrix& caption_embs, double tau,
                  const char* tag_a = nullptr, const char* tag_b = nullptr);

// --- call instrumentation -------------------------------------------------
// When enabled, every loss evaluation records which data-provenance tags its
// query and key sets carried; a mixed record means an original and a
// synthesized pair shared a softmax denominator.
struct CallRecord {
    std::string loss;
    std::string tag_a;
    std::string tag_b;
    bool mixed = false;
};

void set_call_log_enabled(bool enabled);
const std::vector<CallRecord>& call_log();
void clear_call_log();

}  // namespace eavtr::losses
