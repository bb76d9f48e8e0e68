#include "eavtr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "eavtr/captioning.hpp"
#include "eavtr/corpus.hpp"
#include "eavtr/encoder.hpp"
#include "eavtr/evaluation.hpp"
#include "eavtr/eventaug.hpp"
#include "eavtr/training.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace eavtr::cli {
namespace {

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

json defaults_for(const std::string& command) {
    json d = json::object();
    if (command == "gen-data") {
        d = {{"num_videos", 96},    {"frames_per_video", 4}, {"two_event_prob", 0.5},
             {"class_count", 8},    {"noise_sigma", 0.02},   {"frame_size", 32},
             {"seed", 1},           {"train_frac", 2.0 / 3}, {"val_frac", 0.0},
             {"test_frac", 1.0 / 3}};
    } else if (command == "augment-eca") {
        d = {{"top_p", 0.9}, {"seed", 1}};
    } else if (command == "augment-eta") {
        d = {{"scheme", "concat"}, {"seed", 1}, {"batch_size", 16}, {"top_p", 0.9}};
    } else if (command == "mine") {
        d = {{"tau", 0.85}, {"K", 4}};
    } else if (command == "train") {
        d = json::parse(training::TrainConfig{}.to_json());
        json m = json::parse(encoder::ModelConfig{}.to_json());
        for (auto& [k, v] : m.items()) d[k] = v;
    } else if (command == "eval") {
        d = {{"task", "t2v"}, {"split", "test"}};
    } else {
        throw DomainError("no config schema for command: " + command);
    }
    return d;
}

json parse_value(const std::string& text) {
    json v = json::parse(text, nullptr, false);
    if (v.is_discarded()) return json(text);  // bare strings need no quoting
    return v;
}

json resolve_json(const std::string& command, const std::string& config_path,
                  const std::vector<std::string>& overrides) {
    json cfg = defaults_for(command);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw IoError("cannot open config file: " + config_path);
        json file = json::parse(in, nullptr, false);
        if (file.is_discarded() || !file.is_object())
            throw DomainError("config file is not a JSON object: " + config_path);
        for (auto& [k, v] : file.items()) {
            if (!cfg.contains(k)) throw DomainError("unknown config key: " + k);
            cfg[k] = v;
        }
    }
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects key=value, got: " + kv);
        const std::string key = kv.substr(0, eq);
        if (!cfg.contains(key)) throw DomainError("unknown config key: " + key);
        cfg[key] = parse_value(kv.substr(eq + 1));
    }
    return cfg;
}

// nlohmann::json objects keep keys sorted, so dump() is already canonical.
RunConfig make_run_config(const std::string& command, const json& cfg) {
    RunConfig rc;
    rc.command = command;
    rc.json_text = cfg.dump(2);
    return rc;
}

struct RunContext {
    RunConfig config;
    fs::path run_dir;
    RunManifest manifest;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void add_input(const std::string& path) { manifest.input_hashes[path] = file_hash(path); }
    void add_output(const std::string& rel) { manifest.outputs.push_back(rel); }

    void finish() {
        manifest.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_run_manifest(manifest, run_dir.string());
    }
};

RunContext open_run(const std::string& command, const std::string& out_root, const json& cfg) {
    RunContext ctx;
    ctx.config = make_run_config(command, cfg);
    ctx.run_dir = fs::path(out_root) / (command + "-" + ctx.config.hash());
    fs::create_directories(ctx.run_dir);
    std::ofstream cfg_out(ctx.run_dir / "config.json", std::ios::trunc);
    cfg_out << ctx.config.json_text << "\n";
    ctx.manifest.command = command;
    ctx.manifest.config_hash = ctx.config.hash();
    ctx.manifest.config_json = ctx.config.json_text;
    ctx.manifest.outputs.push_back("config.json");
    return ctx;
}

std::string manifest_input(const std::string& corpus_dir) {
    return (fs::path(corpus_dir) / "manifest.json").string();
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

int run_gen_data(const json& cfg, const std::string& out_root) {
    corpus::CorpusSpec spec;
    spec.num_videos = cfg.at("num_videos").get<int>();
    spec.frames_per_video = cfg.at("frames_per_video").get<int>();
    spec.two_event_prob = cfg.at("two_event_prob").get<double>();
    spec.class_count = cfg.at("class_count").get<int>();
    spec.noise_sigma = cfg.at("noise_sigma").get<double>();
    spec.frame_size = cfg.at("frame_size").get<int>();
    spec.seed = cfg.at("seed").get<std::uint64_t>();
    spec.validate();

    RunContext ctx = open_run("gen-data", out_root, cfg);
    corpus::Corpus c = corpus::generate_corpus(spec);
    corpus::split_corpus(c.manifest, cfg.at("train_frac").get<double>(),
                         cfg.at("val_frac").get<double>(), cfg.at("test_frac").get<double>(),
                         mix_seed(spec.seed, 0x5b717));
    corpus::write_manifest(c, ctx.run_dir.string());
    ctx.add_output("manifest.json");
    for (const auto& e : c.manifest.entries) ctx.add_output(e.blob_path);
    ctx.finish();
    std::cout << "run_dir: " << ctx.run_dir.string() << "\n"
              << "videos: " << c.videos.size() << "\n";
    return 0;
}

int run_augment_eca(const json& cfg, const std::string& corpus_dir, const std::string& out_root) {
    RunContext ctx = open_run("augment-eca", out_root, cfg);
    ctx.add_input(manifest_input(corpus_dir));
    corpus::Corpus c = corpus::read_manifest(corpus_dir);
    captioning::OracleCaptioner captioner(cfg.at("top_p").get<double>());
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

    std::ofstream out(ctx.run_dir / "captions.jsonl", std::ios::trunc);
    if (!out) throw IoError("cannot write captions.jsonl");
    for (size_t i = 0; i < c.videos.size(); ++i) {
        const std::uint64_t child = mix_seed(seed, 0xeca000 + i);
        Rng rng(child);
        for (const auto& fc : captioning::eca_augment(c.videos[i], captioner, rng)) {
            json rec = {{"video_id", fc.video_id},
                        {"frame_index", fc.frame_index},
                        {"text", fc.text},
                        {"rng_seed", child}};
            out << rec.dump() << "\n";
        }
    }
    ctx.add_output("captions.jsonl");
    ctx.finish();
    std::cout << "run_dir: " << ctx.run_dir.string() << "\n";
    return 0;
}

int run_augment_eta(const json& cfg, const std::string& corpus_dir, const std::string& out_root) {
    RunContext ctx = open_run("augment-eta", out_root, cfg);
    ctx.add_input(manifest_input(corpus_dir));
    corpus::Corpus c = corpus::read_manifest(corpus_dir);
    const auto scheme = eventaug::scheme_from_name(cfg.at("scheme").get<std::string>());
    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    const int batch_size = cfg.at("batch_size").get<int>();
    if (batch_size < 2) throw DomainError("eta needs batch_size >= 2");

    std::vector<const corpus::Video*> videos;
    for (const auto& v : c.videos) videos.push_back(&v);
    captioning::OracleCaptioner captioner(cfg.at("top_p").get<double>());
    auto captions = captioning::eca_augment_corpus(videos, captioner, seed);

    Rng rng = make_rng(seed, 0xe7a000);
    std::vector<eventaug::SynthPair> pairs;
    for (size_t lo = 0; lo + 1 < videos.size(); lo += static_cast<size_t>(batch_size)) {
        const size_t hi = std::min(videos.size(), lo + static_cast<size_t>(batch_size));
        std::vector<const corpus::Video*> group(videos.begin() + static_cast<long>(lo),
                                                videos.begin() + static_cast<long>(hi));
        std::vector<std::vector<captioning::FrameCaption>> group_caps(
            captions.begin() + static_cast<long>(lo), captions.begin() + static_cast<long>(hi));
        auto batch_pairs = eventaug::eta_batch(group, group_caps, scheme, rng);
        pairs.insert(pairs.end(), batch_pairs.begin(), batch_pairs.end());
    }

    // Synthesized frames reuse the corpus blob container (one blob per pair).
    corpus::Corpus synth;
    std::ofstream out(ctx.run_dir / "pairs.jsonl", std::ios::trunc);
    if (!out) throw IoError("cannot write pairs.jsonl");
    for (size_t i = 0; i < pairs.size(); ++i) {
        corpus::Video v;
        v.video_id = "synth_" + std::to_string(i);
        v.frames = pairs[i].frames;
        v.web_caption = pairs[i].caption;
        synth.videos.push_back(std::move(v));
        corpus::ManifestEntry entry;
        entry.video_id = synth.videos.back().video_id;
        entry.blob_path = entry.video_id + ".bin";
        entry.caption = pairs[i].caption;
        synth.manifest.entries.push_back(entry);
        json rec = {{"pair_id", entry.video_id},
                    {"caption", pairs[i].caption},
                    {"scheme", eventaug::scheme_name(pairs[i].scheme)},
                    {"blob", entry.blob_path},
                    {"source1",
                     {{"video_id", pairs[i].source1.video_id},
                      {"frame_count", pairs[i].source1.frame_count},
                      {"start", pairs[i].source1.start}}},
                    {"source2",
                     {{"video_id", pairs[i].source2.video_id},
                      {"frame_count", pairs[i].source2.frame_count},
                      {"start", pairs[i].source2.start}}}};
        out << rec.dump() << "\n";
    }
    corpus::write_manifest(synth, ctx.run_dir.string());
    ctx.add_output("pairs.jsonl");
    ctx.add_output("manifest.json");
    for (const auto& e : synth.manifest.entries) ctx.add_output(e.blob_path);
    ctx.finish();
    std::cout << "run_dir: " << ctx.run_dir.string() << "\n"
              << "pairs: " << pairs.size() << "\n";
    return 0;
}

int run_mine(const json& cfg, const std::string& corpus_dir, const std::string& out_root) {
    RunContext ctx = open_run("mine", out_root, cfg);
    ctx.add_input(manifest_input(corpus_dir));
    corpus::Corpus c = corpus::read_manifest(corpus_dir);
    const double tau = cfg.at("tau").get<double>();
    const int k = cfg.at("K").get<int>();
    auto enc = eventaug::pixel_frame_encoder();

    std::ofstream out(ctx.run_dir / "verdicts.csv", std::ios::trunc);
    if (!out) throw IoError("cannot write verdicts.csv");
    out << "video_id,min_similarity,is_single_event,threshold\n";
    for (const auto& v : c.videos) {
        auto verdict = eventaug::mine_single_event(v, k, tau, enc);
        out << verdict.video_id << ',' << std::setprecision(17) << verdict.min_similarity << ','
            << (verdict.is_single_event ? 1 : 0) << ',' << verdict.threshold << "\n";
    }
    ctx.add_output("verdicts.csv");
    ctx.finish();
    std::cout << "run_dir: " << ctx.run_dir.string() << "\n";
    return 0;
}

encoder::ModelConfig model_from_flat(const json& cfg) {
    json m = json::parse(encoder::ModelConfig{}.to_json());
    for (auto& [k, v] : m.items()) v = cfg.at(k);
    return encoder::ModelConfig::from_json(m.dump());
}

training::TrainConfig train_from_flat(const json& cfg) {
    json t = json::parse(training::TrainConfig{}.to_json());
    for (auto& [k, v] : t.items()) v = cfg.at(k);
    return training::TrainConfig::from_json(t.dump());
}

int run_train(const json& cfg, const std::string& corpus_dir, const std::string& out_root) {
    encoder::ModelConfig model_cfg = model_from_flat(cfg);
    training::TrainConfig train_cfg = train_from_flat(cfg);
    model_cfg.validate();
    train_cfg.validate();

    RunContext ctx = open_run("train", out_root, cfg);
    ctx.add_input(manifest_input(corpus_dir));
    corpus::Corpus c = corpus::read_manifest(corpus_dir);
    std::vector<const corpus::Video*> train_videos = c.split("train");
    if (train_videos.empty()) {
        for (const auto& v : c.videos) train_videos.push_back(&v);
    }

    training::Trainer trainer(model_cfg, train_cfg, train_videos);
    trainer.run();

    std::ofstream log(ctx.run_dir / "metrics.jsonl", std::ios::trunc);
    if (!log) throw IoError("cannot write metrics.jsonl");
    for (const auto& s : trainer.loss_log()) {
        json rec = {{"step", s.step}, {"lr", s.lr},       {"l_vta", s.l_vta},
                    {"l_ecl", s.l_ecl}, {"l_etl", s.l_etl}};
        log << rec.dump() << "\n";
    }
    training::save_checkpoint(trainer.model(), train_cfg.seed,
                              (ctx.run_dir / "checkpoint.bin").string());
    ctx.add_output("metrics.jsonl");
    ctx.add_output("checkpoint.bin");
    ctx.finish();
    std::cout << "run_dir: " << ctx.run_dir.string() << "\n"
              << "steps: " << trainer.step() << "\n";
    return 0;
}

int run_eval(const json& cfg, const std::string& ckpt, const std::string& corpus_dir,
             const std::string& out_root) {
    RunContext ctx = open_run("eval", out_root, cfg);
    ctx.add_input(ckpt);
    ctx.add_input(manifest_input(corpus_dir));
    auto model = training::load_checkpoint(ckpt);
    corpus::Corpus c = corpus::read_manifest(corpus_dir);
    const std::string split = cfg.at("split").get<std::string>();
    std::vector<const corpus::Video*> videos = c.split(split);
    if (videos.empty() && split == "all") {
        for (const auto& v : c.videos) videos.push_back(&v);
    }
    if (videos.empty()) throw DomainError("split has no videos: " + split);

    const std::string task = cfg.at("task").get<std::string>();
    evaluation::MetricsReport report;
    if (task == "t2v") {
        report = evaluation::t2v_eval(*model, videos);
    } else if (task == "mevtr") {
        report = evaluation::multi_event_eval(*model, videos);
    } else if (task == "moment") {
        report = evaluation::moment_eval(*model, videos);
    } else if (task == "tot") {
        report = evaluation::tot_eval(*model, videos);
    } else if (task == "actrec") {
        report = evaluation::action_recognition_eval(
            *model, videos, corpus::kNumColors * corpus::kNumShapes * corpus::kNumMotions);
    } else {
        throw DomainError("unknown eval task: " + task);
    }

    std::ofstream js(ctx.run_dir / "metrics.json", std::ios::trunc);
    js << report.to_json() << "\n";
    std::ofstream csv(ctx.run_dir / "metrics.csv", std::ios::trunc);
    csv << report.to_csv_row();
    ctx.add_output("metrics.json");
    ctx.add_output("metrics.csv");
    ctx.finish();
    std::cout << "run_dir: " << ctx.run_dir.string() << "\n" << report.to_json() << "\n";
    return 0;
}

int run_report(const std::vector<std::string>& run_dirs, const std::string& out_csv) {
    if (run_dirs.empty()) throw DomainError("report needs at least one run directory");
    struct Row {
        std::string name;
        std::map<std::string, double> values;
    };
    std::vector<Row> rows;
    std::vector<std::string> columns;
    for (const auto& dir : run_dirs) {
        const fs::path path = fs::path(dir) / "metrics.json";
        std::ifstream in(path);
        if (!in) throw IoError("missing MetricsReport: " + path.string());
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded()) throw IntegrityError("invalid MetricsReport: " + path.string());
        Row row;
        row.name = fs::path(dir).filename().string();
        for (auto& [k, v] : j.at("values").items()) {
            row.values[k] = v.get<double>();
            if (std::find(columns.begin(), columns.end(), k) == columns.end())
                columns.push_back(k);
        }
        rows.push_back(std::move(row));
    }
    std::sort(columns.begin(), columns.end());

    std::ostringstream table, csv;
    table << std::left << std::setw(28) << "run";
    csv << "run";
    for (const auto& c : columns) {
        table << std::setw(22) << c;
        csv << ',' << c;
    }
    table << "\n";
    csv << "\n";
    for (const auto& row : rows) {
        table << std::left << std::setw(28) << row.name;
        csv << row.name;
        for (const auto& c : columns) {
            auto it = row.values.find(c);
            if (it == row.values.end()) {
                table << std::setw(22) << "-";  // explicit blank for missing metrics
                csv << ',';
            } else {
                std::ostringstream v;
                v << std::setprecision(6) << it->second;
                table << std::setw(22) << v.str();
                csv << ',' << v.str();
            }
        }
        table << "\n";
        csv << "\n";
    }
    std::cout << table.str();
    if (!out_csv.empty()) {
        std::ofstream out(out_csv, std::ios::trunc);
        if (!out) throw IoError("cannot write report CSV: " + out_csv);
        out << csv.str();
    }
    return 0;
}

}  // namespace

std::string RunConfig::hash() const { return hex64(fnv1a64(command + "\n" + json_text)); }

RunConfig resolve_config(const std::string& command, const std::string& config_path,
                         const std::vector<std::string>& overrides) {
    return make_run_config(command, resolve_json(command, config_path, overrides));
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot hash input: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return hex64(fnv1a64(buf.str()));
}

void write_run_manifest(const RunManifest& manifest, const std::string& run_dir) {
    json j;
    j["command"] = manifest.command;
    j["config_hash"] = manifest.config_hash;
    j["config"] = json::parse(manifest.config_json);
    j["inputs"] = manifest.input_hashes;
    j["outputs"] = manifest.outputs;
    j["wall_clock_seconds"] = manifest.wall_clock_seconds;
    j["tool_version"] = manifest.tool_version;
    const fs::path tmp = fs::path(run_dir) / "run_manifest.json.tmp";
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot write run manifest in " + run_dir);
    out << j.dump(2) << "\n";
    out.close();
    fs::rename(tmp, fs::path(run_dir) / "run_manifest.json");
}

int dispatch(int argc, const char* const* argv) {
    CLI::App app{"event-aware video-text retrieval pipeline"};
    app.require_subcommand(1);

    const char* env_root = std::getenv("EAVTR_OUT_ROOT");
    const std::string default_root = env_root ? env_root : "runs";

    struct Common {
        std::string config_path;
        std::vector<std::string> overrides;
        std::string out = "";
        bool dump = false;
    };
    auto add_common = [&](CLI::App* sub, Common& c) {
        sub->add_option("--config", c.config_path, "JSON config file (flat key-value)");
        sub->add_option("--set", c.overrides, "override a config key, key=value (repeatable)");
        sub->add_option("--out", c.out, "output root directory")->default_val(default_root);
        sub->add_flag("--dump-config", c.dump, "print the resolved config and exit");
    };

    Common gen_c;
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
    add_common(gen, gen_c);

    auto* aug = app.add_subcommand("augment", "event augmentation");
    aug->require_subcommand(1);
    Common eca_c, eta_c;
    std::string eca_corpus, eta_corpus;
    auto* eca = aug->add_subcommand("eca", "per-frame event content captions");
    add_common(eca, eca_c);
    eca->add_option("--corpus", eca_corpus, "corpus directory")->required();
    double eca_p = -1.0;
    eca->add_option("--p", eca_p, "nucleus sampling mass");
    auto* eta = aug->add_subcommand("eta", "two-video temporal synthesis");
    add_common(eta, eta_c);
    eta->add_option("--corpus", eta_corpus, "corpus directory")->required();
    std::string eta_scheme;
    eta->add_option("--scheme", eta_scheme, "concat|wsum");

    Common mine_c;
    std::string mine_corpus;
    double mine_tau = -1.0;
    int mine_k = -1;
    auto* mine = app.add_subcommand("mine", "single-event mining verdicts");
    add_common(mine, mine_c);
    mine->add_option("--corpus", mine_corpus, "corpus directory")->required();
    mine->add_option("--tau", mine_tau, "similarity threshold");
    mine->add_option("--K", mine_k, "sampled frames per video");

    Common train_c;
    std::string train_corpus;
    auto* train = app.add_subcommand("train", "alternating-iteration training");
    add_common(train, train_c);
    train->add_option("--corpus", train_corpus, "corpus directory")->required();

    Common eval_c;
    std::string eval_corpus, eval_ckpt, eval_task, eval_split;
    auto* eval = app.add_subcommand("eval", "run an evaluation protocol");
    add_common(eval, eval_c);
    eval->add_option("--corpus", eval_corpus, "corpus directory")->required();
    eval->add_option("--ckpt", eval_ckpt, "model checkpoint")->required();
    eval->add_option("--task", eval_task, "t2v|mevtr|moment|tot|actrec");
    eval->add_option("--split", eval_split, "corpus split tag");

    std::vector<std::string> report_dirs;
    std::string report_csv;
    auto* report = app.add_subcommand("report", "compare metrics across runs");
    report->add_option("runs", report_dirs, "eval run directories")->required();
    report->add_option("--csv", report_csv, "also write the table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        auto resolve = [](const std::string& command, Common& c) {
            json cfg = resolve_json(command, c.config_path, c.overrides);
            if (c.dump) {
                std::cout << cfg.dump(2) << "\n";
                return json();
            }
            return cfg;
        };
        if (gen->parsed()) {
            json cfg = resolve("gen-data", gen_c);
            return cfg.is_null() ? 0 : run_gen_data(cfg, gen_c.out);
        }
        if (eca->parsed()) {
            if (eca_p >= 0) eca_c.overrides.push_back("top_p=" + std::to_string(eca_p));
            json cfg = resolve("augment-eca", eca_c);
            return cfg.is_null() ? 0 : run_augment_eca(cfg, eca_corpus, eca_c.out);
        }
        if (eta->parsed()) {
            if (!eta_scheme.empty()) eta_c.overrides.push_back("scheme=" + eta_scheme);
            json cfg = resolve("augment-eta", eta_c);
            return cfg.is_null() ? 0 : run_augment_eta(cfg, eta_corpus, eta_c.out);
        }
        if (mine->parsed()) {
            if (mine_tau >= 0) mine_c.overrides.push_back("tau=" + std::to_string(mine_tau));
            if (mine_k >= 0) mine_c.overrides.push_back("K=" + std::to_string(mine_k));
            json cfg = resolve("mine", mine_c);
            return cfg.is_null() ? 0 : run_mine(cfg, mine_corpus, mine_c.out);
        }
        if (train->parsed()) {
            json cfg = resolve("train", train_c);
            return cfg.is_null() ? 0 : run_train(cfg, train_corpus, train_c.out);
        }
        if (eval->parsed()) {
            if (!eval_task.empty()) eval_c.overrides.push_back("task=" + eval_task);
            if (!eval_split.empty()) eval_c.overrides.push_back("split=" + eval_split);
            json cfg = resolve("eval", eval_c);
            return cfg.is_null() ? 0 : run_eval(cfg, eval_ckpt, eval_corpus, eval_c.out);
        }
        if (report->parsed()) return run_report(report_dirs, report_csv);
        throw DomainError("no subcommand selected");
    } catch (const DomainError& e) {
        std::cerr << "domain-error: " << e.what() << "\n";
    } catch (const VersionError& e) {
        std::cerr << "version-error: " << e.what() << "\n";
    } catch (const IntegrityError& e) {
        std::cerr << "integrity-error: " << e.what() << "\n";
    } catch (const IoError& e) {
        std::cerr << "io-error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "internal-error: " << e.what() << "\n";
    }
    return 1;
}

}  // namespace eavtr::cli
