#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "eavtr/corpus.hpp"
#include "eavtr/nn.hpp"

namespace eavtr::encoder {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct ModelConfig {
    int hidden_dim = 64;
    int blocks = 2;
    int heads = 4;
    int patch_size = 8;
    int frames = 4;
    int frame_size = 32;
    int proj_dim = 256;
    int text_blocks = 2;
    int text_max_len = 32;
    bool use_frame_cls = true;
    bool share_video_frame_head = false;
    std::uint64_t init_seed = 1234;

    int patches_per_frame() const {
        return (frame_size / patch_size) * (frame_size / patch_size);
    }
    int patch_dim() const { return patch_size * patch_size * corpus::kChannels; }
    void validate() const;

    std::string to_json() const;
    static ModelConfig from_json(const std::string& text);
};

struct TokenCoord {
    int frame = -1;    // -1 for the video CLS token
    int spatial = -1;  // -1 for CLS tokens
    bool is_video_cls = false;
    bool is_frame_cls = false;
};

// sequence = [video_cls] ++ for each frame j: [frame_cls_j] ++ patches_j
struct TokenLayout {
    int frames = 0;
    int patches = 0;
    bool use_frame_cls = true;
    std::vector<TokenCoord> tokens;

    int size() const { return static_cast<int>(tokens.size()); }
    int video_cls_index() const { return 0; }
    int frame_cls_index(int j) const;
    int patch_index(int j, int p) const;
};

TokenLayout build_token_layout(int frames, int patches, bool use_frame_cls = true);

using BoolMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Spatial phase: q attends k iff same frame, or q or k is the video CLS.
BoolMask spatial_mask(const TokenLayout& layout);
// Temporal phase: patches attend across frames at equal spatial index,
// frame CLS tokens attend only themselves, the video CLS attends everything.
BoolMask temporal_mask(const TokenLayout& layout);

// Flattened per-patch pixel rows (P x patch_dim), row-major over the grid.
Matrix patchify(const corpus::Frame& frame, int patch_size);

// Inference-side embeddings with access instrumentation: the inference
// contract tests count which granularity each protocol touched.
struct EmbeddingSet {
    Vector video;   // proj_dim, unit norm
    Matrix frames;  // frames x proj_dim, unit norm rows
    mutable int video_reads = 0;
    mutable int frame_reads = 0;

    const Vector& video_embedding() const {
        ++video_reads;
        return video;
    }
    const Matrix& frame_embeddings() const {
        ++frame_reads;
        return frames;
    }
};

double cosine(const Vector& u, const Vector& v);

class DualEncoder {
  public:
    explicit DualEncoder(ModelConfig config);

    const ModelConfig& config() const { return config_; }
    nn::ParamStore& params() { return params_; }
    const nn::ParamStore& params() const { return params_; }
    size_t parameter_count() const { return params_.parameter_count(); }
    int sequence_length() const { return layout_.size(); }
    const TokenLayout& layout() const { return layout_; }

    struct VideoVars {
        nn::Var video;   // 1 x proj_dim, unit norm
        nn::Var frames;  // frames x proj_dim, unit norm rows (invalid when frame CLS off)
    };

    VideoVars encode_frames(nn::Tape& tape, const std::vector<corpus::Frame>& frames);
    VideoVars encode_video(nn::Tape& tape, const corpus::Video& video);
    nn::Var encode_text(nn::Tape& tape, const std::string& text);

    EmbeddingSet embed_video(const corpus::Video& video);
    EmbeddingSet embed_frames(const std::vector<corpus::Frame>& frames);
    Vector embed_text(const std::string& text);

    // Patch embeddings of one frame including its position terms (eval path).
    Matrix patch_embeddings(const corpus::Frame& frame, int frame_index);

  private:
    nn::Var attention(nn::Tape& tape, nn::Var x, const std::string& prefix, const Matrix* mask);
    nn::Var feed_forward(nn::Tape& tape, nn::Var x, const std::string& prefix);
    nn::Var layer_norm(nn::Tape& tape, nn::Var x, const std::string& prefix);
    nn::Var project(nn::Tape& tape, nn::Var x, const std::string& head);

    ModelConfig config_;
    TokenLayout layout_;
    nn::ParamStore params_;
    Matrix spatial_add_mask_;   // 0 where allowed, -1e9 where masked
    Matrix temporal_add_mask_;
};

}  // namespace eavtr::encoder
