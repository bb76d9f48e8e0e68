// Acceptance harness: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "eavtr/captioning.hpp"
#include "eavtr/corpus.hpp"
#include "eavtr/encoder.hpp"
#include "eavtr/evaluation.hpp"
#include "eavtr/eventaug.hpp"
#include "eavtr/losses.hpp"
#include "eavtr/nn.hpp"
#include "eavtr/training.hpp"

using namespace eavtr;
using losses::Matrix;
using losses::Vector;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %2d (%s): %s%s%s\n", idx, name.c_str(), pass ? "PASS" : "FAIL",
                detail.empty() ? "" : " — ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix random_unit_rows(int rows, int dim, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, dim);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < dim; ++j) m(i, j) = normal(rng);
        m.row(i).normalize();
    }
    return m;
}

// Naive symmetric InfoNCE, no stabilization, straight from the definition.
double brute_force_symmetric(const Matrix& a, const Matrix& b, double tau) {
    const int m = static_cast<int>(a.rows());
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        double da = 0.0, db = 0.0;
        for (int k = 0; k < m; ++k) {
            da += std::exp(a.row(i).dot(b.row(k)) / tau);
            db += std::exp(b.row(i).dot(a.row(k)) / tau);
        }
        total += -std::log(std::exp(a.row(i).dot(b.row(i)) / tau) / da);
        total += -std::log(std::exp(b.row(i).dot(a.row(i)) / tau) / db);
    }
    return total / (2.0 * m);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// Criteria 1-3: loss oracles, gradients, degenerate exactness
// ---------------------------------------------------------------------------

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    double max_err = 0.0;
    Rng rng = make_rng(42);
    std::uniform_int_distribution<int> pick(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const int b = pick(rng);
        const int n = pick(rng);
        Matrix f = random_unit_rows(b * n, 8, 100 + trial);
        Matrix t = random_unit_rows(b * n, 8, 300 + trial);
        max_err = std::max(max_err, std::abs(losses::ecl_loss(f, t, b, n, 0.07).value -
                                             brute_force_symmetric(f, t, 0.07)));
        Matrix v = f.topRows(b);
        Matrix c = t.topRows(b);
        max_err = std::max(max_err, std::abs(losses::etl_loss(v, c, 0.07).value -
                                             brute_force_symmetric(v, c, 0.07)));
        max_err = std::max(max_err, std::abs(losses::vta_loss(v, c, 0.05).value -
                                             brute_force_symmetric(v, c, 0.05)));
    }
    const double secs = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max |Δ| = %.2e over 200 cases, %.1f s", max_err, secs);
    report(1, "loss oracle", max_err < 1e-10 && secs < 10.0, detail);
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    const double w_vta = 1.0, w_ecl = 1.0, w_etl = 1.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int b = 2 + trial % 2;
        const int n = 2 + trial % 3;
        Matrix f = random_unit_rows(b * n, 6, 600 + trial);
        Matrix t = random_unit_rows(b * n, 6, 700 + trial);
        Matrix v = random_unit_rows(b, 6, 800 + trial);
        Matrix c = random_unit_rows(b, 6, 900 + trial);
        Matrix sv = random_unit_rows(b, 6, 1000 + trial);
        Matrix sc = random_unit_rows(b, 6, 1100 + trial);

        // Each embedding set feeds exactly one term of the combined loss, so
        // the combined gradient w.r.t. it is the weighted per-term gradient;
        // differencing only that term avoids cancellation noise from the
        // constant remainder.
        const auto ecl = losses::ecl_loss(f, t, b, n, 0.07);
        const auto vta = losses::vta_loss(v, c, 0.05);
        const auto etl = losses::etl_loss(sv, sc, 0.07);

        worst = std::max(worst, nn::max_relative_grad_error(
            [&](const Matrix& x) { return w_ecl * losses::ecl_loss(x, t, b, n, 0.07).value; },
            f, Matrix(w_ecl * ecl.d_a), 1e-4));
        worst = std::max(worst, nn::max_relative_grad_error(
            [&](const Matrix& x) { return w_ecl * losses::ecl_loss(f, x, b, n, 0.07).value; },
            t, Matrix(w_ecl * ecl.d_b), 1e-4));
        // Step 1e-4 balances truncation against roundoff for near-zero
        // gradient entries of well-aligned instances.
        worst = std::max(worst, nn::max_relative_grad_error(
            [&](const Matrix& x) { return w_vta * losses::vta_loss(x, c, 0.05).value; }, v,
            Matrix(w_vta * vta.d_a), 1e-4));
        worst = std::max(worst, nn::max_relative_grad_error(
            [&](const Matrix& x) { return w_vta * losses::vta_loss(v, x, 0.05).value; }, c,
            Matrix(w_vta * vta.d_b), 1e-4));
        worst = std::max(worst, nn::max_relative_grad_error(
            [&](const Matrix& x) { return w_etl * losses::etl_loss(x, sc, 0.07).value; }, sv,
            Matrix(w_etl * etl.d_a), 1e-4));
        worst = std::max(worst, nn::max_relative_grad_error(
            [&](const Matrix& x) { return w_etl * losses::etl_loss(sv, x, 0.07).value; }, sc,
            Matrix(w_etl * etl.d_b), 1e-4));
    }
    const double secs = seconds_since(t0);
    char detail[128];
    std::snprintf(detail, sizeof(detail), "max rel err = %.2e over 20 instances, %.1f s", worst,
                  secs);
    report(2, "gradient check", worst < 1e-4 && secs < 60.0, detail);
}

void criterion_3() {
    Matrix one_a = random_unit_rows(1, 8, 31);
    Matrix one_b = random_unit_rows(1, 8, 32);
    const bool zero_ok = losses::ecl_loss(one_a, one_b, 1, 1, 0.07).value == 0.0 &&
                         losses::etl_loss(one_a, one_b, 0.07).value == 0.0 &&
                         losses::vta_loss(one_a, one_b, 0.05).value == 0.0;

    // All rows equal: every similarity is exactly 1, softmax is uniform.
    const int b = 3, n = 2;
    Matrix f(b * n, 8), t(b * n, 8);
    Matrix u = random_unit_rows(1, 8, 33);
    for (int i = 0; i < b * n; ++i) { f.row(i) = u.row(0); t.row(i) = u.row(0); }
    const double ecl = losses::ecl_loss(f, t, b, n, 0.07).value;
    const double etl = losses::etl_loss(f.topRows(b), t.topRows(b), 0.07).value;
    const double vta = losses::vta_loss(f.topRows(b), t.topRows(b), 0.05).value;
    const bool uniform_ok = std::abs(ecl - std::log(double(b * n))) < 1e-9 &&
                            std::abs(etl - std::log(double(b))) < 1e-9 &&
                            std::abs(vta - std::log(double(b))) < 1e-9;
    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "B=1,N=1 exact zero: %s; uniform ECL-ln(BN)=%.1e, ETL-ln(B)=%.1e",
                  zero_ok ? "yes" : "no", std::abs(ecl - std::log(double(b * n))),
                  std::abs(etl - std::log(double(b))));
    report(3, "degenerate exactness", zero_ok && uniform_ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 4: mask structure and one-block frame locality
// ---------------------------------------------------------------------------

void criterion_4() {
    const auto layout = encoder::build_token_layout(4, 16);
    const auto mask = encoder::spatial_mask(layout);
    bool mask_ok = true;
    for (int j = 0; j < 4 && mask_ok; ++j) {
        const int row = layout.frame_cls_index(j);
        std::set<int> allowed = {layout.video_cls_index(), row};
        for (int p = 0; p < 16; ++p) allowed.insert(layout.patch_index(j, p));
        for (int k = 0; k < layout.size(); ++k) {
            if (mask(row, k) != (allowed.count(k) > 0)) mask_ok = false;
        }
    }

    encoder::ModelConfig mc;
    mc.hidden_dim = 16;
    mc.blocks = 1;
    mc.heads = 2;
    mc.patch_size = 8;
    mc.frames = 4;
    mc.frame_size = 16;
    mc.text_blocks = 1;
    mc.init_seed = 77;
    encoder::DualEncoder model(mc);
    const auto video = corpus::make_video("acc04", {corpus::make_event(5, 0, 4)}, 4, 0.02,
                                          1234, 16);
    auto base = model.embed_video(video);
    corpus::Video perturbed = video;
    for (auto& px : perturbed.frames[2].pixels) px = std::min(1.0f, px + 0.25f);
    auto after = model.embed_video(perturbed);
    double max_other = 0.0;
    for (int j = 0; j < 4; ++j) {
        if (j == 2) continue;
        max_other = std::max(
            max_other, (base.frame_embeddings().row(j) - after.frame_embeddings().row(j))
                           .cwiseAbs()
                           .maxCoeff());
    }
    const double moved =
        (base.frame_embeddings().row(2) - after.frame_embeddings().row(2)).cwiseAbs().maxCoeff();
    const bool local_ok = max_other < 1e-6 && moved > 1e-4;
    char detail[128];
    std::snprintf(detail, sizeof(detail),
                  "mask rows exact: %s; other-frame drift %.1e, perturbed frame %.1e",
                  mask_ok ? "yes" : "no", max_other, moved);
    report(4, "encoder mask structure", mask_ok && local_ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: ETA closed forms
// ---------------------------------------------------------------------------

void criterion_5() {
    const int n = 4;
    Rng rng = make_rng(55);
    const auto v1 = corpus::make_video("acc05a", {corpus::make_event(3, 0, n)}, n, 0.02, 9, 16);
    const auto v2 = corpus::make_video("acc05b", {corpus::make_event(77, 0, n)}, n, 0.02, 10, 16);

    const auto sched = eventaug::WeightSchedule::linear(n);
    const auto blend = eventaug::synthesize_weighted_sum(v1.frames, v2.frames, sched);
    bool ws_ok = true;
    for (int j = 0; j < n && ws_ok; ++j) {
        const double w = sched.weights[static_cast<size_t>(j)];
        for (size_t p = 0; p < blend[j].pixels.size(); ++p) {
            const float expect = static_cast<float>(w * double(v1.frames[j].pixels[p]) +
                                                    (1.0 - w) * double(v2.frames[j].pixels[p]));
            if (blend[j].pixels[p] != expect) { ws_ok = false; break; }
        }
    }
    const bool endpoints_ok = blend[0].pixels == v1.frames[0].pixels &&
                              blend[n - 1].pixels == v2.frames[n - 1].pixels;

    bool concat_ok = true;
    for (int m1 = 1; m1 < n; ++m1) {
        std::vector<corpus::Frame> a(v1.frames.begin(), v1.frames.begin() + m1);
        std::vector<corpus::Frame> b(v2.frames.begin(), v2.frames.begin() + (n - m1));
        const auto cat = eventaug::synthesize_concat(a, b, n);
        for (int j = 0; j < n; ++j) {
            const auto& src = j < m1 ? a[j] : b[j - m1];
            if (cat[j].pixels != src.pixels) concat_ok = false;
        }
    }
    (void)rng;
    char detail[128];
    std::snprintf(detail, sizeof(detail), "blend bit-exact: %s; pure endpoints: %s; concat: %s",
                  ws_ok ? "yes" : "no", endpoints_ok ? "yes" : "no", concat_ok ? "yes" : "no");
    report(5, "eta exactness", ws_ok && endpoints_ok && concat_ok, detail);
}

// ---------------------------------------------------------------------------
// Criterion 6: metric oracles
// ---------------------------------------------------------------------------

void criterion_6() {
    std::mt19937_64 rng(606);
    bool ok = true;
    int trials = 0;
    for (int trial = 0; trial < 500 && ok; ++trial, ++trials) {
        const int cands = 2 + static_cast<int>(rng() % 9);
        const int q = 1 + static_cast<int>(rng() % 5);
        Matrix c = random_unit_rows(cands, 5, rng());
        Matrix qs = random_unit_rows(q, 5, rng());
        std::vector<int> gt(q);
        for (auto& g : gt) g = static_cast<int>(rng() % cands);
        const auto table = evaluation::rank_candidates(qs, c, gt);

        // rank / recall / median rank
        std::vector<int> ranks(q);
        for (int i = 0; i < q; ++i) {
            const double s = qs.row(i).dot(c.row(gt[i]));
            int r = 1;
            for (int j = 0; j < cands; ++j) {
                const double sj = qs.row(i).dot(c.row(j));
                if (sj > s || (sj == s && j < gt[i])) ++r;
            }
            ranks[i] = r;
        }
        if (table.gt_rank != ranks) ok = false;
        const int k = 1 + static_cast<int>(rng() % cands);
        int hits = 0;
        for (int r : ranks) hits += r <= k;
        if (std::abs(evaluation::recall_at_k(table, k) - double(hits) / q) > 1e-12) ok = false;
        std::vector<int> sr = ranks;
        std::sort(sr.begin(), sr.end());
        const double med = q % 2 ? sr[q / 2] : 0.5 * (sr[q / 2 - 1] + sr[q / 2]);
        if (std::abs(evaluation::median_rank(table) - med) > 1e-12) ok = false;

        // multi-event triple
        evaluation::MultiEventSample s;
        s.scores = Vector::Zero(cands);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int i = 0; i < cands; ++i) s.scores[i] = u(rng);
        const int g = 1 + static_cast<int>(rng() % std::min(3, cands));
        std::set<int> gset;
        while (static_cast<int>(gset.size()) < g) gset.insert(static_cast<int>(rng() % cands));
        s.gt.assign(gset.begin(), gset.end());
        const auto me = evaluation::multi_event_metrics({s}, k);
        std::vector<int> order(cands);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            if (s.scores[x] != s.scores[y]) return s.scores[x] > s.scores[y];
            return x < y;
        });
        int inter = 0;
        for (int i = 0; i < k; ++i) inter += gset.count(order[i]);
        if (std::abs(me.average - double(inter) / g) > 1e-12) ok = false;
        if (std::abs(me.one_hit - (inter > 0 ? 1.0 : 0.0)) > 1e-12) ok = false;
        if (me.all_hit.has_value() != (k >= g)) ok = false;
        if (me.all_hit && std::abs(*me.all_hit - (inter == g ? 1.0 : 0.0)) > 1e-12) ok = false;

        // moment retrieval against a window enumeration oracle
        const int nf = 2 + static_cast<int>(rng() % 5);
        Matrix fr = random_unit_rows(nf, 5, rng());
        Vector qv = qs.row(0).transpose();
        const int gs = static_cast<int>(rng() % nf);
        const int ge = gs + 1 + static_cast<int>(rng() % (nf - gs));
        const int topn = 1 + static_cast<int>(rng() % 3);
        const double theta = 0.3 + 0.1 * static_cast<int>(rng() % 7);
        struct W { int s, e; double score; };
        std::vector<W> ws;
        for (int st = 0; st < nf; ++st) {
            for (int en = st + 1; en <= nf; ++en) {
                double sum = 0.0;
                for (int j = st; j < en; ++j) sum += fr.row(j).dot(qv.transpose());
                ws.push_back({st, en, sum / (en - st)});
            }
        }
        std::sort(ws.begin(), ws.end(), [](const W& a, const W& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.e - a.s != b.e - b.s) return a.e - a.s > b.e - b.s;
            return a.s < b.s;
        });
        bool oracle_hit = false;
        for (int i = 0; i < std::min<int>(topn, ws.size()); ++i) {
            if (evaluation::temporal_iou(ws[i].s, ws[i].e, gs, ge) >= theta) oracle_hit = true;
        }
        if (evaluation::moment_hit(fr, qv, gs, ge, topn, theta) != oracle_hit) ok = false;

        // time-order consistency and top-1 accuracy on the same draws
        evaluation::ToTSample tot;
        tot.video = qs.row(0).transpose();
        tot.correct = c.row(0).transpose();
        tot.swapped = c.row(1 % cands).transpose();
        const double want = tot.video.dot(tot.correct) > tot.video.dot(tot.swapped) ? 1.0 : 0.0;
        if (std::abs(evaluation::time_order_consistency({tot}) - want) > 1e-12) ok = false;
        int best = 0;
        for (int j = 1; j < cands; ++j)
            if (qs.row(0).dot(c.row(j)) > qs.row(0).dot(c.row(best))) best = j;
        const double acc = evaluation::top1_accuracy(qs.topRows(1), c, {best});
        if (acc != 1.0) ok = false;
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "%d random instances, all metrics agree", trials);
    report(6, "metric oracles", ok, detail);
}

// ---------------------------------------------------------------------------
// Criteria 7-10: trained-model behavior (shared training matrix)
// ---------------------------------------------------------------------------

// Frozen acceptance setup (see the calibration notes in the decisions ledger).
constexpr std::uint64_t kCorpusSeed = 18;  // all 32 test dense captions unique
constexpr int kEpochs = 150;
constexpr double kWEcl = 4.0;

// Thresholds frozen from the first calibration run.
// Frozen from the 5-seed calibration matrix (medians: R@1 0.25, R@5 0.7188),
// with margin for cross-platform floating-point drift.
constexpr double kFullR1Min = 0.20;
constexpr double kFullR5Min = 0.65;
constexpr double kVtaTotLo = 0.43;
constexpr double kVtaTotHi = 0.57;
constexpr double kEtlTotMin = 0.80;

struct VariantResult {
    double r1 = 0.0, r5 = 0.0, tot = -1.0;
};

corpus::Corpus acceptance_corpus() {
    corpus::CorpusSpec spec;
    spec.num_videos = 96;
    spec.frames_per_video = 4;
    spec.two_event_prob = 1.0;
    spec.class_count = 8;
    spec.frame_size = 16;
    spec.seed = kCorpusSeed;
    auto c = corpus::generate_corpus(spec);
    corpus::split_corpus(c.manifest, 2.0 / 3.0, 0.0, 1.0 / 3.0, mix_seed(kCorpusSeed, 0x5b717));
    return c;
}

corpus::Corpus tot_corpus() {
    corpus::CorpusSpec spec;
    spec.num_videos = 400;
    spec.frames_per_video = 4;
    spec.two_event_prob = 1.0;
    spec.class_count = 8;
    spec.frame_size = 16;
    spec.seed = mix_seed(kCorpusSeed, 0x707);
    return corpus::generate_corpus(spec);
}

VariantResult train_variant(const corpus::Corpus& c, const corpus::Corpus& totc,
                            const std::string& variant, std::uint64_t seed, bool eval_tot) {
    encoder::ModelConfig mc;
    mc.hidden_dim = 32;
    mc.blocks = 2;
    mc.heads = 4;
    mc.patch_size = 8;
    mc.frames = 4;
    mc.frame_size = 16;
    mc.init_seed = mix_seed(seed, 0xcafe);

    training::TrainConfig tc;
    tc.batch_size = 16;
    tc.epochs = kEpochs;
    tc.peak_lr = 3e-3;
    tc.seed = seed;
    tc.w_ecl = kWEcl;
    if (variant == "vta") { tc.enable_ecl = false; tc.enable_etl = false; }
    if (variant == "ecl") { tc.enable_etl = false; }
    if (variant == "etl") { tc.enable_ecl = false; }
    if (variant == "wsum") { tc.scheme = eventaug::Scheme::WeightedSum; }

    training::Trainer trainer(mc, tc, c.split("train"));
    trainer.run();

    VariantResult out;
    auto r = evaluation::t2v_eval(trainer.model(), c.split("test"));
    out.r1 = r.values.at("r1");
    out.r5 = r.values.at("r5");
    if (eval_tot) {
        std::vector<const corpus::Video*> vids;
        for (const auto& v : totc.videos) vids.push_back(&v);
        out.tot = evaluation::tot_eval(trainer.model(), vids).values.at("consistency");
    }
    return out;
}

void criteria_7_to_10() {
    const auto c = acceptance_corpus();
    const auto totc = tot_corpus();
    const std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    const std::vector<std::string> variants = {"full", "vta", "ecl", "etl", "wsum"};

    std::map<std::string, std::vector<VariantResult>> results;
    for (const auto seed : seeds) {
        for (const auto& variant : variants) {
            const bool eval_tot = variant == "vta" || variant == "etl";
            results[variant].push_back(train_variant(c, totc, variant, seed, eval_tot));
            std::fprintf(stderr, "  [matrix] variant=%s seed=%llu r1=%.3f r5=%.3f tot=%.3f\n",
                         variant.c_str(), static_cast<unsigned long long>(seed),
                         results[variant].back().r1, results[variant].back().r5,
                         results[variant].back().tot);
        }
    }
    auto med = [&](const std::string& v, auto field) {
        std::vector<double> xs;
        for (const auto& r : results[v]) xs.push_back(field(r));
        return median(xs);
    };
    const double full_r1 = med("full", [](const VariantResult& r) { return r.r1; });
    const double full_r5 = med("full", [](const VariantResult& r) { return r.r5; });
    const double vta_r5 = med("vta", [](const VariantResult& r) { return r.r5; });
    const double ecl_r5 = med("ecl", [](const VariantResult& r) { return r.r5; });
    const double etl_r5 = med("etl", [](const VariantResult& r) { return r.r5; });
    const double wsum_r5 = med("wsum", [](const VariantResult& r) { return r.r5; });
    const double vta_tot = med("vta", [](const VariantResult& r) { return r.tot; });
    const double etl_tot = med("etl", [](const VariantResult& r) { return r.tot; });

    char d7[128];
    std::snprintf(d7, sizeof(d7), "median R@1 %.3f (min %.3f), R@5 %.3f (min %.3f)", full_r1,
                  kFullR1Min, full_r5, kFullR5Min);
    report(7, "end-to-end retrieval", full_r1 >= kFullR1Min && full_r5 >= kFullR5Min, d7);

    char d8[160];
    std::snprintf(d8, sizeof(d8), "median R@5: vta %.3f < ecl %.3f, vta < etl %.3f, both < full %.3f",
                  vta_r5, ecl_r5, etl_r5, full_r5);
    report(8, "component ablation direction",
           vta_r5 < ecl_r5 && vta_r5 < etl_r5 && ecl_r5 < full_r5 && etl_r5 < full_r5, d8);

    char d9[160];
    std::snprintf(d9, sizeof(d9), "ToT: vta-only %.3f (want %.2f..%.2f), etl-trained %.3f (min %.2f)",
                  vta_tot, kVtaTotLo, kVtaTotHi, etl_tot, kEtlTotMin);
    report(9, "test-of-time direction",
           vta_tot >= kVtaTotLo && vta_tot <= kVtaTotHi && etl_tot >= kEtlTotMin, d9);

    char d10[96];
    std::snprintf(d10, sizeof(d10), "median R@5: concat %.3f >= weighted-sum %.3f", full_r5,
                  wsum_r5);
    report(10, "synthesis scheme direction", full_r5 >= wsum_r5, d10);
}

// ---------------------------------------------------------------------------
// Criterion 11: single-event miner on constructed videos
// ---------------------------------------------------------------------------

void criterion_11() {
    const double tau = 0.85;
    const auto enc = eventaug::pixel_frame_encoder();
    int agree = 0, total = 0;

    // 100 single-event videos across the class space.
    for (int i = 0; i < 100; ++i) {
        const int cls = (i * 7) % 192;
        const auto v = corpus::make_video("acc11s" + std::to_string(i),
                                          {corpus::make_event(cls, 0, 4)}, 4, 0.02,
                                          mix_seed(11, i), 16);
        const auto verdict = eventaug::mine_single_event(v, 4, tau, enc);
        agree += verdict.is_single_event;
        ++total;
    }

    // 100 two-event videos constructed so the cross-event pixel cosine < tau.
    int built = 0;
    for (int a = 0; a < 192 && built < 100; ++a) {
        for (int b = 0; b < 192 && built < 100; ++b) {
            if (a % 8 == b % 8) continue;  // need different colors for separation
            const auto v = corpus::make_video(
                "acc11d" + std::to_string(built),
                {corpus::make_event(a, 0, 2), corpus::make_event(b, 2, 4)}, 4, 0.02,
                mix_seed(12, built), 16);
            if (corpus::pixel_cosine(v.frames[0], v.frames[2]) >= tau) continue;
            const auto verdict = eventaug::mine_single_event(v, 4, tau, enc);
            agree += !verdict.is_single_event;
            ++total;
            ++built;
        }
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d/%d verdicts agree with construction", agree, total);
    report(11, "single-event miner", agree == total && total == 200, detail);
}

// ---------------------------------------------------------------------------
// Criterion 12: determinism and resume
// ---------------------------------------------------------------------------

void criterion_12() {
    corpus::CorpusSpec spec;
    spec.num_videos = 12;
    spec.frames_per_video = 2;
    spec.frame_size = 16;
    spec.seed = 7;
    const auto c = corpus::generate_corpus(spec);
    std::vector<const corpus::Video*> vids;
    for (const auto& v : c.videos) vids.push_back(&v);

    encoder::ModelConfig mc;
    mc.hidden_dim = 16;
    mc.blocks = 1;
    mc.heads = 2;
    mc.patch_size = 8;
    mc.frames = 2;
    mc.frame_size = 16;
    mc.text_blocks = 1;
    mc.text_max_len = 16;
    mc.init_seed = 42;

    training::TrainConfig tc;
    tc.batch_size = 4;
    tc.epochs = 4;
    tc.seed = 11;

    auto eval_json = [&](training::Trainer& t) {
        return evaluation::t2v_eval(t.model(), vids).to_json();
    };
    training::Trainer a(mc, tc, vids), b(mc, tc, vids);
    a.run_steps(5);
    b.run_steps(5);
    const bool identical = eval_json(a) == eval_json(b);

    // Resume: save after 5 steps, reload into a fresh trainer, compare the
    // next three loss records bit-exactly to the uninterrupted run.
    const auto path =
        (std::filesystem::temp_directory_path() / "eavtr_acceptance_state.bin").string();
    a.save_state(path);
    training::Trainer resumed(mc, tc, vids);
    resumed.load_state(path);
    a.run_steps(3);
    resumed.run_steps(3);
    bool resume_ok = true;
    for (int i = 1; i <= 3; ++i) {
        const auto& x = a.loss_log()[a.loss_log().size() - i];
        const auto& y = resumed.loss_log()[resumed.loss_log().size() - i];
        if (x.l_vta != y.l_vta || x.l_ecl != y.l_ecl || x.l_etl != y.l_etl) resume_ok = false;
    }
    std::remove(path.c_str());
    char detail[96];
    std::snprintf(detail, sizeof(detail), "reports bit-identical: %s; resume losses identical: %s",
                  identical ? "yes" : "no", resume_ok ? "yes" : "no");
    report(12, "determinism and resume", identical && resume_ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    // --skip-training: developer shortcut that leaves out the slow trained-
    // model criteria (7-10); the default invocation runs everything.
    const bool skip_training = argc > 1 && std::string(argv[1]) == "--skip-training";
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    if (!skip_training) criteria_7_to_10();
    criterion_11();
    criterion_12();
    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", g_failures);
    return 1;
}
