#include "eavtr/encoder.hpp"

#include <cmath>

#include "eavtr/vocab.hpp"
#include "json.hpp"

using nlohmann::json;

namespace eavtr::encoder {

void ModelConfig::validate() const {
    if (hidden_dim <= 0 || hidden_dim % heads != 0)
        throw DomainError("hidden_dim must be positive and divisible by heads");
    if (proj_dim != 256) throw DomainError("projection dim is fixed at 256");
    if (frame_size % patch_size != 0) throw DomainError("frame_size not divisible by patch_size");
    if (blocks < 1 || text_blocks < 1) throw DomainError("need at least one block");
    if (frames < 1) throw DomainError("frames must be >= 1");
}

std::string ModelConfig::to_json() const {
    json j{{"hidden_dim", hidden_dim}, {"blocks", blocks}, {"heads", heads},
           {"patch_size", patch_size}, {"frames", frames}, {"frame_size", frame_size},
           {"proj_dim", proj_dim}, {"text_blocks", text_blocks}, {"text_max_len", text_max_len},
           {"use_frame_cls", use_frame_cls}, {"share_video_frame_head", share_video_frame_head},
           {"init_seed", init_seed}};
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    ModelConfig c;
    c.hidden_dim = j.at("hidden_dim").get<int>();
    c.blocks = j.at("blocks").get<int>();
    c.heads = j.at("heads").get<int>();
    c.patch_size = j.at("patch_size").get<int>();
    c.frames = j.at("frames").get<int>();
    c.frame_size = j.at("frame_size").get<int>();
    c.proj_dim = j.at("proj_dim").get<int>();
    c.text_blocks = j.at("text_blocks").get<int>();
    c.text_max_len = j.at("text_max_len").get<int>();
    c.use_frame_cls = j.at("use_frame_cls").get<bool>();
    c.share_video_frame_head = j.at("share_video_frame_head").get<bool>();
    c.init_seed = j.at("init_seed").get<std::uint64_t>();
    return c;
}

int TokenLayout::frame_cls_index(int j) const {
    if (!use_frame_cls) throw DomainError("layout has no frame CLS tokens");
    return 1 + j * (1 + patches);
}

int TokenLayout::patch_index(int j, int p) const {
    int group = 1 + j * ((use_frame_cls ? 1 : 0) + patches);
    return group + (use_frame_cls ? 1 : 0) + p;
}

TokenLayout build_token_layout(int frames, int patches, bool use_frame_cls) {
    TokenLayout layout;
    layout.frames = frames;
    layout.patches = patches;
    layout.use_frame_cls = use_frame_cls;
    TokenCoord vcls;
    vcls.is_video_cls = true;
    layout.tokens.push_back(vcls);
    for (int j = 0; j < frames; ++j) {
        if (use_frame_cls) {
            TokenCoord fc;
            fc.frame = j;
            fc.is_frame_cls = true;
            layout.tokens.push_back(fc);
        }
        for (int p = 0; p < patches; ++p) {
            TokenCoord pc;
            pc.frame = j;
            pc.spatial = p;
            layout.tokens.push_back(pc);
        }
    }
    return layout;
}

BoolMask spatial_mask(const TokenLayout& layout) {
    const int s = layout.size();
    BoolMask mask(s, s);
    for (int q = 0; q < s; ++q) {
        for (int k = 0; k < s; ++k) {
            const auto& tq = layout.tokens[static_cast<size_t>(q)];
            const auto& tk = layout.tokens[static_cast<size_t>(k)];
            mask(q, k) = tq.is_video_cls || tk.is_video_cls || (tq.frame == tk.frame);
        }
    }
    return mask;
}

BoolMask temporal_mask(const TokenLayout& layout) {
    const int s = layout.size();
    BoolMask mask(s, s);
    for (int q = 0; q < s; ++q) {
        for (int k = 0; k < s; ++k) {
            const auto& tq = layout.tokens[static_cast<size_t>(q)];
            const auto& tk = layout.tokens[static_cast<size_t>(k)];
            bool allowed = false;
            if (tq.is_video_cls) {
                allowed = true;
            } else if (tq.is_frame_cls) {
                allowed = q == k;
            } else {
                allowed = !tk.is_video_cls && !tk.is_frame_cls && tq.spatial == tk.spatial;
            }
            mask(q, k) = allowed;
        }
    }
    return mask;
}

Matrix patchify(const corpus::Frame& frame, int patch_size) {
    if (frame.height % patch_size != 0 || frame.width % patch_size != 0)
        throw DomainError("frame dimensions not divisible by patch size");
    const int grid_h = frame.height / patch_size;
    const int grid_w = frame.width / patch_size;
    Matrix out(grid_h * grid_w, patch_size * patch_size * corpus::kChannels);
    for (int gy = 0; gy < grid_h; ++gy) {
        for (int gx = 0; gx < grid_w; ++gx) {
            int row = gy * grid_w + gx;
            int col = 0;
            for (int y = 0; y < patch_size; ++y)
                for (int x = 0; x < patch_size; ++x)
                    for (int c = 0; c < corpus::kChannels; ++c)
                        out(row, col++) = frame.at(gy * patch_size + y, gx * patch_size + x, c);
        }
    }
    return out;
}

double cosine(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw DomainError("cosine dimension mismatch");
    return u.dot(v);
}

namespace {

Matrix additive_mask(const BoolMask& allowed) {
    Matrix m = Matrix::Zero(allowed.rows(), allowed.cols());
    for (Eigen::Index q = 0; q < allowed.rows(); ++q)
        for (Eigen::Index k = 0; k < allowed.cols(); ++k)
            if (!allowed(q, k)) m(q, k) = -1e9;
    return m;
}

}  // namespace

DualEncoder::DualEncoder(ModelConfig config) : config_(config) {
    config_.validate();
    layout_ = build_token_layout(config_.frames, config_.patches_per_frame(), config_.use_frame_cls);
    spatial_add_mask_ = additive_mask(spatial_mask(layout_));
    temporal_add_mask_ = additive_mask(temporal_mask(layout_));

    Rng rng = make_rng(config_.init_seed, 0x90de1);
    const int d = config_.hidden_dim;
    const double std = 0.02;

    params_.create("patch_embed.w", config_.patch_dim(), d, std, rng);
    params_.create("patch_embed.b", 1, d, std, rng);
    params_.create("pos.spatial", config_.patches_per_frame(), d, std, rng);
    params_.create("pos.temporal", config_.frames, d, std, rng);
    params_.create("video_cls", 1, d, std, rng);
    if (config_.use_frame_cls) params_.create("frame_cls", 1, d, std, rng);

    auto make_block = [&](const std::string& prefix, bool two_phase) {
        std::vector<std::string> phases = two_phase ? std::vector<std::string>{"spatial", "temporal"}
                                                    : std::vector<std::string>{"attn"};
        for (const auto& phase : phases) {
            std::string p = prefix + phase + ".";
            params_.create_constant(p + "ln.g", 1, d, 1.0);
            params_.create_constant(p + "ln.b", 1, d, 0.0);
            params_.create(p + "wq", d, d, std, rng);
            params_.create(p + "bq", 1, d, 0.0, rng);
            params_.create(p + "wk", d, d, std, rng);
            params_.create(p + "bk", 1, d, 0.0, rng);
            params_.create(p + "wv", d, d, std, rng);
            params_.create(p + "bv", 1, d, 0.0, rng);
            params_.create(p + "wo", d, d, std, rng);
            params_.create(p + "bo", 1, d, 0.0, rng);
        }
        params_.create_constant(prefix + "ffn.ln.g", 1, d, 1.0);
        params_.create_constant(prefix + "ffn.ln.b", 1, d, 0.0);
        params_.create(prefix + "ffn.w1", d, 4 * d, std, rng);
        params_.create(prefix + "ffn.b1", 1, 4 * d, 0.0, rng);
        params_.create(prefix + "ffn.w2", 4 * d, d, std, rng);
        params_.create(prefix + "ffn.b2", 1, d, 0.0, rng);
    };

    for (int b = 0; b < config_.blocks; ++b) {
        make_block("video.block" + std::to_string(b) + ".", true);
    }
    params_.create_constant("video.final_ln.g", 1, d, 1.0);
    params_.create_constant("video.final_ln.b", 1, d, 0.0);

    const int vocab_size = static_cast<int>(vocab::closed_vocabulary().size());
    params_.create("text.tok_embed", vocab_size, d, std, rng);
    params_.create("text.pos", config_.text_max_len, d, std, rng);
    params_.create("text.cls", 1, d, std, rng);
    for (int b = 0; b < config_.text_blocks; ++b) {
        make_block("text.block" + std::to_string(b) + ".", false);
    }
    params_.create_constant("text.final_ln.g", 1, d, 1.0);
    params_.create_constant("text.final_ln.b", 1, d, 0.0);

    params_.create("head.video.w", d, config_.proj_dim, std, rng);
    params_.create("head.video.b", 1, config_.proj_dim, 0.0, rng);
    if (config_.use_frame_cls && !config_.share_video_frame_head) {
        params_.create("head.frame.w", d, config_.proj_dim, std, rng);
        params_.create("head.frame.b", 1, config_.proj_dim, 0.0, rng);
    }
    params_.create("head.text.w", d, config_.proj_dim, std, rng);
    params_.create("head.text.b", 1, config_.proj_dim, 0.0, rng);
}

nn::Var DualEncoder::layer_norm(nn::Tape& tape, nn::Var x, const std::string& prefix) {
    return tape.layernorm_rows(x, tape.param(params_.get(prefix + "ln.g")),
                               tape.param(params_.get(prefix + "ln.b")));
}

nn::Var DualEncoder::attention(nn::Tape& tape, nn::Var x, const std::string& prefix,
                               const Matrix* mask) {
    const int d = config_.hidden_dim;
    const int heads = config_.heads;
    const int hd = d / heads;
    nn::Var xn = layer_norm(tape, x, prefix);
    nn::Var q = tape.add_rowvec(tape.matmul(xn, tape.param(params_.get(prefix + "wq"))),
                                tape.param(params_.get(prefix + "bq")));
    nn::Var k = tape.add_rowvec(tape.matmul(xn, tape.param(params_.get(prefix + "wk"))),
                                tape.param(params_.get(prefix + "bk")));
    nn::Var v = tape.add_rowvec(tape.matmul(xn, tape.param(params_.get(prefix + "wv"))),
                                tape.param(params_.get(prefix + "bv")));
    nn::Var mask_var;
    if (mask) mask_var = tape.constant(*mask);
    std::vector<nn::Var> head_outputs;
    for (int h = 0; h < heads; ++h) {
        nn::Var qh = tape.slice_cols(q, h * hd, hd);
        nn::Var kh = tape.slice_cols(k, h * hd, hd);
        nn::Var vh = tape.slice_cols(v, h * hd, hd);
        nn::Var scores = tape.scale(tape.matmul_nt(qh, kh), 1.0 / std::sqrt(static_cast<double>(hd)));
        if (mask) scores = tape.add(scores, mask_var);
        head_outputs.push_back(tape.matmul(tape.softmax_rows(scores), vh));
    }
    nn::Var merged = tape.concat_cols(head_outputs);
    nn::Var out = tape.add_rowvec(tape.matmul(merged, tape.param(params_.get(prefix + "wo"))),
                                  tape.param(params_.get(prefix + "bo")));
    return tape.add(x, out);
}

nn::Var DualEncoder::feed_forward(nn::Tape& tape, nn::Var x, const std::string& prefix) {
    nn::Var xn = layer_norm(tape, x, prefix + "ffn.");
    nn::Var h = tape.gelu(tape.add_rowvec(tape.matmul(xn, tape.param(params_.get(prefix + "ffn.w1"))),
                                          tape.param(params_.get(prefix + "ffn.b1"))));
    nn::Var out = tape.add_rowvec(tape.matmul(h, tape.param(params_.get(prefix + "ffn.w2"))),
                                  tape.param(params_.get(prefix + "ffn.b2")));
    return tape.add(x, out);
}

nn::Var DualEncoder::project(nn::Tape& tape, nn::Var x, const std::string& head) {
    std::string name = head;
    if (name == "frame" && (config_.share_video_frame_head || !params_.has("head.frame.w")))
        name = "video";
    nn::Var projected = tape.add_rowvec(tape.matmul(x, tape.param(params_.get("head." + name + ".w"))),
                                        tape.param(params_.get("head." + name + ".b")));
    return tape.l2_normalize_rows(projected);
}

DualEncoder::VideoVars DualEncoder::encode_frames(nn::Tape& tape,
                                                  const std::vector<corpus::Frame>& frames) {
    if (static_cast<int>(frames.size()) != config_.frames)
        throw DomainError("frame count does not match model configuration");

    nn::Var patch_w = tape.param(params_.get("patch_embed.w"));
    nn::Var patch_b = tape.param(params_.get("patch_embed.b"));
    nn::Var pos_spatial = tape.param(params_.get("pos.spatial"));
    nn::Var pos_temporal = tape.param(params_.get("pos.temporal"));

    std::vector<nn::Var> rows;
    rows.push_back(tape.param(params_.get("video_cls")));
    for (int j = 0; j < config_.frames; ++j) {
        nn::Var pos_t_row = tape.gather_rows(pos_temporal, {j});
        if (config_.use_frame_cls) {
            rows.push_back(tape.add(tape.param(params_.get("frame_cls")), pos_t_row));
        }
        nn::Var pixels = tape.constant(patchify(frames[static_cast<size_t>(j)], config_.patch_size));
        nn::Var embedded = tape.add_rowvec(tape.matmul(pixels, patch_w), patch_b);
        embedded = tape.add(embedded, pos_spatial);
        embedded = tape.add_rowvec(embedded, pos_t_row);
        rows.push_back(embedded);
    }
    nn::Var x = tape.concat_rows(rows);

    // Spatial phase first, then temporal: with one block the frame CLS output
    // is a function of its own frame only (the temporal row of a frame CLS
    // token admits only itself).
    for (int b = 0; b < config_.blocks; ++b) {
        std::string prefix = "video.block" + std::to_string(b) + ".";
        x = attention(tape, x, prefix + "spatial.", &spatial_add_mask_);
        x = attention(tape, x, prefix + "temporal.", &temporal_add_mask_);
        x = feed_forward(tape, x, prefix);
    }
    x = layer_norm(tape, x, "video.final_");

    VideoVars out;
    out.video = project(tape, tape.gather_rows(x, {layout_.video_cls_index()}), "video");
    if (config_.use_frame_cls) {
        std::vector<int> cls_rows;
        for (int j = 0; j < config_.frames; ++j) cls_rows.push_back(layout_.frame_cls_index(j));
        out.frames = project(tape, tape.gather_rows(x, cls_rows), "frame");
    }
    return out;
}

DualEncoder::VideoVars DualEncoder::encode_video(nn::Tape& tape, const corpus::Video& video) {
    return encode_frames(tape, video.frames);
}

nn::Var DualEncoder::encode_text(nn::Tape& tape, const std::string& text) {
    std::vector<int> ids = vocab::tokenize(text);
    if (ids.empty()) throw DomainError("cannot encode empty text");
    if (static_cast<int>(ids.size()) + 1 > config_.text_max_len)
        throw DomainError("text exceeds maximum token count");

    nn::Var tok = tape.gather_rows(tape.param(params_.get("text.tok_embed")), ids);
    std::vector<int> pos_rows(ids.size() + 1);
    for (size_t i = 0; i < pos_rows.size(); ++i) pos_rows[i] = static_cast<int>(i);
    nn::Var x = tape.concat_rows({tape.param(params_.get("text.cls")), tok});
    x = tape.add(x, tape.gather_rows(tape.param(params_.get("text.pos")), pos_rows));

    for (int b = 0; b < config_.text_blocks; ++b) {
        std::string prefix = "text.block" + std::to_string(b) + ".";
        x = attention(tape, x, prefix + "attn.", nullptr);
        x = feed_forward(tape, x, prefix);
    }
    x = layer_norm(tape, x, "text.final_");
    return project(tape, tape.gather_rows(x, {0}), "text");
}

EmbeddingSet DualEncoder::embed_frames(const std::vector<corpus::Frame>& frames) {
    nn::Tape tape;
    VideoVars vars = encode_frames(tape, frames);
    EmbeddingSet out;
    out.video = tape.val(vars.video).row(0).transpose();
    if (vars.frames.valid()) out.frames = tape.val(vars.frames);
    return out;
}

EmbeddingSet DualEncoder::embed_video(const corpus::Video& video) {
    return embed_frames(video.frames);
}

Vector DualEncoder::embed_text(const std::string& text) {
    nn::Tape tape;
    nn::Var v = encode_text(tape, text);
    return tape.val(v).row(0).transpose();
}

Matrix DualEncoder::patch_embeddings(const corpus::Frame& frame, int frame_index) {
    Matrix base = patchify(frame, config_.patch_size) * params_.get("patch_embed.w").value;
    base.rowwise() += params_.get("patch_embed.b").value.row(0);
    base += params_.get("pos.spatial").value;
    base.rowwise() += params_.get("pos.temporal").value.row(frame_index);
    return base;
}

}  // namespace eavtr::encoder
