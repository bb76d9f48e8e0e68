#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eavtr/captioning.hpp"
#include "eavtr/encoder.hpp"
#include "eavtr/eventaug.hpp"
#include "eavtr/losses.hpp"

namespace eavtr::training {

struct TrainConfig {
    int batch_size = 16;
    int epochs = 30;
    double peak_lr = 3e-3;
    double warmup_frac = 0.1;
    double w_vta = 1.0;
    double w_ecl = 1.0;
    double w_etl = 1.0;
    bool enable_vta = true;
    bool enable_ecl = true;
    bool enable_etl = true;
    eventaug::Scheme scheme = eventaug::Scheme::Concat;
    std::uint64_t seed = 0;
    double weight_decay = 0.01;
    double top_p = 0.9;
    bool grad_accumulation = false;  // one optimizer update per AIT iteration
    losses::Temperatures temperatures;

    void validate() const;
    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
};

// Linear warm-up to peak, then cosine decay to exactly 0 at total_steps.
double lr_schedule(int step, int total_steps, double peak, double warmup_fraction);

struct StepLosses {
    int step = 0;
    double lr = 0.0;
    double l_vta = 0.0;
    double l_ecl = 0.0;
    double l_etl = 0.0;
};

class Trainer {
  public:
    Trainer(encoder::ModelConfig model_config, TrainConfig train_config,
            std::vector<const corpus::Video*> train_videos);

    int total_steps() const { return total_steps_; }
    int step() const { return step_; }
    encoder::DualEncoder& model() { return *model_; }
    const std::vector<StepLosses>& loss_log() const { return log_; }

    void run();                 // all remaining epochs
    void run_steps(int count);  // granular driver, used by resume tests

    // Full training state (parameters + optimizer moments + step counters);
    // load(save(x)) resumes bit-exactly.
    void save_state(const std::string& path) const;
    void load_state(const std::string& path);

  private:
    struct Batch {
        std::vector<const corpus::Video*> videos;
        std::vector<std::vector<captioning::FrameCaption>> frame_captions;
        std::vector<eventaug::SynthPair> synth;
    };

    Batch make_batch(int epoch, int batch_index);
    int batches_per_epoch() const;
    StepLosses ait_step(const Batch& batch, double lr);

    encoder::ModelConfig model_config_;
    TrainConfig config_;
    std::vector<const corpus::Video*> videos_;
    std::unique_ptr<encoder::DualEncoder> model_;
    std::vector<StepLosses> log_;
    int step_ = 0;
    int total_steps_ = 0;
    bool warned_disabled_etl_ = false;
};

// Model-only checkpoint: versioned container of shape-tagged parameter
// arrays plus the model config JSON and the training seed.
void save_checkpoint(const encoder::DualEncoder& model, std::uint64_t seed,
                     const std::string& path);
std::unique_ptr<encoder::DualEncoder> load_checkpoint(const std::string& path,
                                                      std::uint64_t* seed_out = nullptr);

}  // namespace eavtr::training
