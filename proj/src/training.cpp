#include "eavtr/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "json.hpp"

using nlohmann::json;

namespace eavtr::training {

void TrainConfig::validate() const {
    if (epochs < 1) throw DomainError("epochs must be >= 1");
    if ((enable_vta || enable_ecl || enable_etl) && batch_size < 2)
        throw DomainError("batch size must be >= 2 with contrastive losses enabled");
    if (peak_lr <= 0) throw DomainError("peak learning rate must be positive");
    if (warmup_frac < 0 || warmup_frac >= 1) throw DomainError("warmup fraction in [0,1)");
    if (top_p <= 0 || top_p > 1) throw DomainError("top_p in (0,1]");
}

std::string TrainConfig::to_json() const {
    json j{{"batch_size", batch_size}, {"epochs", epochs}, {"peak_lr", peak_lr},
           {"warmup_frac", warmup_frac}, {"w_vta", w_vta}, {"w_ecl", w_ecl}, {"w_etl", w_etl},
           {"enable_vta", enable_vta}, {"enable_ecl", enable_ecl}, {"enable_etl", enable_etl},
           {"scheme", eventaug::scheme_name(scheme)}, {"seed", seed},
           {"weight_decay", weight_decay}, {"top_p", top_p},
           {"grad_accumulation", grad_accumulation},
           {"tau_ecl", temperatures.ecl}, {"tau_etl", temperatures.etl},
           {"tau_vta", temperatures.vta}};
    return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    json j = json::parse(text);
    TrainConfig c;
    c.batch_size = j.at("batch_size").get<int>();
    c.epochs = j.at("epochs").get<int>();
    c.peak_lr = j.at("peak_lr").get<double>();
    c.warmup_frac = j.at("warmup_frac").get<double>();
    c.w_vta = j.at("w_vta").get<double>();
    c.w_ecl = j.at("w_ecl").get<double>();
    c.w_etl = j.at("w_etl").get<double>();
    c.enable_vta = j.at("enable_vta").get<bool>();
    c.enable_ecl = j.at("enable_ecl").get<bool>();
    c.enable_etl = j.at("enable_etl").get<bool>();
    c.scheme = eventaug::scheme_from_name(j.at("scheme").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.weight_decay = j.at("weight_decay").get<double>();
    c.top_p = j.at("top_p").get<double>();
    c.grad_accumulation = j.at("grad_accumulation").get<bool>();
    c.temperatures.ecl = j.at("tau_ecl").get<double>();
    c.temperatures.etl = j.at("tau_etl").get<double>();
    c.temperatures.vta = j.at("tau_vta").get<double>();
    return c;
}

double lr_schedule(int step, int total_steps, double peak, double warmup_fraction) {
    if (total_steps < 1) throw DomainError("total_steps must be >= 1");
    if (step < 0 || step > total_steps) throw DomainError("step out of schedule range");
    const int warmup = static_cast<int>(std::llround(warmup_fraction * total_steps));
    if (step <= warmup) {
        return warmup == 0 ? peak : peak * static_cast<double>(step) / warmup;
    }
    if (step == total_steps) return 0.0;
    const double t = static_cast<double>(step - warmup) / (total_steps - warmup);
    return peak * 0.5 * (1.0 + std::cos(M_PI * t));
}

Trainer::Trainer(encoder::ModelConfig model_config, TrainConfig train_config,
                 std::vector<const corpus::Video*> train_videos)
    : model_config_(model_config), config_(train_config), videos_(std::move(train_videos)) {
    config_.validate();
    if (videos_.empty()) throw DomainError("training corpus is empty");
    model_ = std::make_unique<encoder::DualEncoder>(model_config_);
    total_steps_ = config_.epochs * batches_per_epoch();
    if (total_steps_ < 1) throw DomainError("no trainable batches");
}

int Trainer::batches_per_epoch() const {
    const int n = static_cast<int>(videos_.size());
    int full = n / config_.batch_size;
    int rest = n % config_.batch_size;
    return full + (rest >= 2 ? 1 : 0);
}

Trainer::Batch Trainer::make_batch(int epoch, int batch_index) {
    std::vector<size_t> order(videos_.size());
    std::iota(order.begin(), order.end(), 0);
    const std::uint64_t epoch_seed = mix_seed(config_.seed, 0xe90c + static_cast<std::uint64_t>(epoch));
    Rng shuffle_rng = make_rng(epoch_seed, 0x51);
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    const int begin = batch_index * config_.batch_size;
    const int end = std::min<int>(begin + config_.batch_size, static_cast<int>(order.size()));

    Batch batch;
    captioning::OracleCaptioner captioner(config_.top_p);
    for (int i = begin; i < end; ++i) {
        const corpus::Video* v = videos_[order[static_cast<size_t>(i)]];
        batch.videos.push_back(v);
        // Fixed per-epoch caption pool: one caption per frame per epoch seed.
        Rng cap_rng = make_rng(epoch_seed, 0xeca000 + order[static_cast<size_t>(i)]);
        batch.frame_captions.push_back(captioning::eca_augment(*v, captioner, cap_rng));
    }
    if (batch.videos.size() >= 2) {
        Rng eta_rng = make_rng(epoch_seed, 0xe7a000 + static_cast<std::uint64_t>(batch_index));
        batch.synth = eventaug::eta_batch(batch.videos, batch.frame_captions, config_.scheme,
                                          eta_rng);
    }
    return batch;
}

StepLosses Trainer::ait_step(const Batch& batch, double lr) {
    StepLosses losses;
    losses.step = step_;
    losses.lr = lr;
    const int b = static_cast<int>(batch.videos.size());
    const int n = model_config_.frames;
    auto& store = model_->params();
    bool pending_update = false;

    // Phase 1: original video-text pairs (VTA + ECL).
    if (config_.enable_vta || config_.enable_ecl) {
        nn::Tape tape;
        std::vector<nn::Var> video_vars, frame_vars, caption_vars, frame_caption_vars;
        for (int i = 0; i < b; ++i) {
            auto enc = model_->encode_video(tape, *batch.videos[static_cast<size_t>(i)]);
            video_vars.push_back(enc.video);
            if (config_.enable_ecl) {
                frame_vars.push_back(enc.frames);
                for (const auto& fc : batch.frame_captions[static_cast<size_t>(i)]) {
                    frame_caption_vars.push_back(model_->encode_text(tape, fc.text));
                }
            }
            if (config_.enable_vta) {
                caption_vars.push_back(
                    model_->encode_text(tape, batch.videos[static_cast<size_t>(i)]->web_caption));
            }
        }
        if (config_.enable_vta) {
            nn::Var f_v = tape.concat_rows(video_vars);
            nn::Var f_c = tape.concat_rows(caption_vars);
            auto lg = losses::vta_loss(tape.val(f_v), tape.val(f_c), config_.temperatures.vta,
                                       "original", "original");
            losses.l_vta = lg.value;
            tape.add_grad(f_v, config_.w_vta * lg.d_a);
            tape.add_grad(f_c, config_.w_vta * lg.d_b);
        }
        if (config_.enable_ecl) {
            nn::Var f_f = tape.concat_rows(frame_vars);
            nn::Var f_t = tape.concat_rows(frame_caption_vars);
            auto lg = losses::ecl_loss(tape.val(f_f), tape.val(f_t), b, n,
                                       config_.temperatures.ecl, "original", "original");
            losses.l_ecl = lg.value;
            tape.add_grad(f_f, config_.w_ecl * lg.d_a);
            tape.add_grad(f_t, config_.w_ecl * lg.d_b);
        }
        if (!std::isfinite(losses.l_vta) || !std::isfinite(losses.l_ecl)) {
            std::ostringstream diag;
            diag << "non-finite loss at step " << step_ << "; batch:";
            for (const auto* v : batch.videos) diag << ' ' << v->video_id;
            throw std::runtime_error(diag.str());
        }
        tape.backward();
        if (config_.grad_accumulation) {
            pending_update = true;
        } else {
            store.adamw_step(lr, 0.9, 0.999, 1e-8, config_.weight_decay);
            store.zero_grad();
        }
    }

    // Phase 2: synthesized video-text pairs (ETL) in their own softmax.
    if (!batch.synth.empty()) {
        if (!config_.enable_etl) {
            if (!warned_disabled_etl_) {
                std::cerr << "warning: ETL disabled, ignoring synthesized batch\n";
                warned_disabled_etl_ = true;
            }
        } else {
            nn::Tape tape;
            std::vector<nn::Var> synth_vars, caption_vars;
            for (const auto& sp : batch.synth) {
                synth_vars.push_back(model_->encode_frames(tape, sp.frames).video);
                caption_vars.push_back(model_->encode_text(tape, sp.caption));
            }
            nn::Var f_vs = tape.concat_rows(synth_vars);
            nn::Var f_cs = tape.concat_rows(caption_vars);
            auto lg = losses::etl_loss(tape.val(f_vs), tape.val(f_cs), config_.temperatures.etl,
                                       "synthesized", "synthesized");
            losses.l_etl = lg.value;
            if (!std::isfinite(losses.l_etl)) {
                throw std::runtime_error("non-finite ETL loss at step " + std::to_string(step_));
            }
            tape.add_grad(f_vs, config_.w_etl * lg.d_a);
            tape.add_grad(f_cs, config_.w_etl * lg.d_b);
            tape.backward();
            if (config_.grad_accumulation) {
                pending_update = true;
            } else {
                store.adamw_step(lr, 0.9, 0.999, 1e-8, config_.weight_decay);
                store.zero_grad();
            }
        }
    }

    if (pending_update) {
        store.adamw_step(lr, 0.9, 0.999, 1e-8, config_.weight_decay);
        store.zero_grad();
    }
    return losses;
}

void Trainer::run_steps(int count) {
    const int per_epoch = batches_per_epoch();
    for (int i = 0; i < count && step_ < total_steps_; ++i) {
        const int epoch = step_ / per_epoch;
        const int batch_index = step_ % per_epoch;
        Batch batch = make_batch(epoch, batch_index);
        const double lr = lr_schedule(step_ + 1, total_steps_, config_.peak_lr, config_.warmup_frac);
        log_.push_back(ait_step(batch, lr));
        ++step_;
    }
}

void Trainer::run() { run_steps(total_steps_ - step_); }

namespace {
constexpr char kStateMagic[8] = {'E', 'A', 'V', 'T', 'S', 'T', '0', '1'};
constexpr char kCkptMagic[8] = {'E', 'A', 'V', 'C', 'K', 'P', 'T', '1'};

void write_header(std::ostream& out, const char magic[8], const std::string& meta) {
    out.write(magic, 8);
    std::uint64_t len = meta.size();
    out.write(reinterpret_cast<const char*>(&len), 8);
    out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
}

std::string read_header(std::istream& in, const char magic[8]) {
    char got[8];
    in.read(got, 8);
    if (!in || std::memcmp(got, magic, 8) != 0) throw VersionError("bad checkpoint magic");
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 8);
    if (!in) throw IntegrityError("truncated checkpoint header");
    std::string meta(len, '\0');
    in.read(meta.data(), static_cast<std::streamsize>(len));
    if (!in) throw IntegrityError("truncated checkpoint metadata");
    return meta;
}
}  // namespace

void Trainer::save_state(const std::string& path) const {
    json meta;
    meta["model_config"] = json::parse(model_config_.to_json());
    meta["train_config"] = json::parse(config_.to_json());
    meta["step"] = step_;
    meta["total_steps"] = total_steps_;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write train state: " + path);
    write_header(out, kStateMagic, meta.dump());
    model_->params().save(out, /*with_optimizer_state=*/true);
}

void Trainer::load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read train state: " + path);
    json meta = json::parse(read_header(in, kStateMagic));
    encoder::ModelConfig file_config = encoder::ModelConfig::from_json(meta.at("model_config").dump());
    if (file_config.to_json() != model_config_.to_json())
        throw IntegrityError("train state model config mismatch");
    step_ = meta.at("step").get<int>();
    model_->params().load(in, /*with_optimizer_state=*/true);
}

void save_checkpoint(const encoder::DualEncoder& model, std::uint64_t seed,
                     const std::string& path) {
    json meta;
    meta["model_config"] = json::parse(model.config().to_json());
    meta["seed"] = seed;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    write_header(out, kCkptMagic, meta.dump());
    model.params().save(out, /*with_optimizer_state=*/false);
}

std::unique_ptr<encoder::DualEncoder> load_checkpoint(const std::string& path,
                                                      std::uint64_t* seed_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint: " + path);
    json meta = json::parse(read_header(in, kCkptMagic));
    auto model = std::make_unique<encoder::DualEncoder>(
        encoder::ModelConfig::from_json(meta.at("model_config").dump()));
    if (seed_out) *seed_out = meta.at("seed").get<std::uint64_t>();
    model->params().load(in, /*with_optimizer_state=*/false);
    return model;
}

}  // namespace eavtr::training
