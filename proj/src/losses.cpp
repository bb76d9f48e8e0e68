#include "eavtr/losses.hpp"

#include <cmath>

namespace eavtr::losses {

namespace {

bool g_log_enabled = false;
std::vector<CallRecord> g_log;

void record_call(const char* loss, const char* tag_a, const char* tag_b) {
    if (!g_log_enabled) return;
    CallRecord r;
    r.loss = loss;
    r.tag_a = tag_a ? tag_a : "";
    r.tag_b = tag_b ? tag_b : "";
    r.mixed = !r.tag_a.empty() && !r.tag_b.empty() && r.tag_a != r.tag_b;
    g_log.push_back(std::move(r));
}

// Symmetric InfoNCE over S = A * B^T with diagonal positives; value is the
// mean of the two directional terms over all rows.
LossGrad symmetric_info_nce(const Matrix& a, const Matrix& b, double tau, const char* loss_name,
                            const char* tag_a, const char* tag_b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DomainError(std::string(loss_name) + ": embedding shape mismatch");
    if (a.rows() == 0) throw DomainError(std::string(loss_name) + ": empty batch");
    record_call(loss_name, tag_a, tag_b);

    const Eigen::Index m = a.rows();
    SimilarityMatrix sim;
    sim.s = a * b.transpose();
    sim.positive.resize(static_cast<size_t>(m));
    for (Eigen::Index q = 0; q < m; ++q) sim.positive[static_cast<size_t>(q)] = static_cast<int>(q);

    InfoNceResult a2b = info_nce(sim, tau);
    SimilarityMatrix sim_t;
    sim_t.s = sim.s.transpose();
    sim_t.positive = sim.positive;
    InfoNceResult b2a = info_nce(sim_t, tau);

    LossGrad out;
    out.value = (a2b.per_query.sum() + b2a.per_query.sum()) / (2.0 * static_cast<double>(m));
    Matrix d_s = (a2b.d_sim + b2a.d_sim.transpose()) / (2.0 * static_cast<double>(m));
    out.d_a = d_s * b;
    out.d_b = d_s.transpose() * a;
    return out;
}

}  // namespace

void SimilarityMatrix::validate() const {
    if (s.rows() == 0 || s.cols() == 0) throw DomainError("empty similarity matrix");
    if (static_cast<Eigen::Index>(positive.size()) != s.rows())
        throw DomainError("positive map size mismatch");
    for (int p : positive) {
        if (p < 0 || p >= s.cols()) throw DomainError("no positive registered for a query");
    }
}

InfoNceResult info_nce(const SimilarityMatrix& sim, double tau) {
    if (tau <= 0) throw DomainError("temperature must be positive");
    sim.validate();

    const Eigen::Index rows = sim.s.rows();
    const Eigen::Index cols = sim.s.cols();
    InfoNceResult out;
    out.per_query.resize(rows);
    out.d_sim = Matrix::Zero(rows, cols);

    for (Eigen::Index q = 0; q < rows; ++q) {
        const int pos = sim.positive[static_cast<size_t>(q)];
        Eigen::RowVectorXd z = sim.s.row(q) / tau;
        const double zmax = z.maxCoeff();
        Eigen::RowVectorXd e = (z.array() - zmax).exp();
        const double denom = e.sum();
        out.per_query[q] = std::log(denom) + zmax - z[pos];
        out.d_sim.row(q) = e / (denom * tau);
        out.d_sim(q, pos) -= 1.0 / tau;
    }
    return out;
}

LossGrad ecl_loss(const Matrix& frame_embs, const Matrix& text_embs, int batch, int frames,
                  double tau, const char* tag_a, const char* tag_b) {
    if (frame_embs.rows() != static_cast<Eigen::Index>(batch) * frames)
        throw DomainError("ecl_loss: rows must equal B*N");
    return symmetric_info_nce(frame_embs, text_embs, tau, "ecl", tag_a, tag_b);
}

LossGrad etl_loss(const Matrix& video_embs, const Matrix& caption_embs, double tau,
                  const char* tag_a, const char* tag_b) {
    return symmetric_info_nce(video_embs, caption_embs, tau, "etl", tag_a, tag_b);
}

LossGrad vta_loss(const Matrix& video_embs, const Matrix& caption_embs, double tau,
                  const char* tag_a, const char* tag_b) {
    return symmetric_info_nce(video_embs, caption_embs, tau, "vta", tag_a, tag_b);
}

void set_call_log_enabled(bool enabled) { g_log_enabled = enabled; }
const std::vector<CallRecord>& call_log() { return g_log; }
void clear_call_log() { g_log.clear(); }

}  // namespace eavtr::losses
