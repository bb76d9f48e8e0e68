#include "eavtr/corpus.hpp"

#include "eavtr/vocab.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace eavtr::corpus {

namespace {

constexpr std::uint32_t kBlobMagic = 0x42564145u;  // "EAVB" little-endian

const std::array<std::array<float, 3>, kNumColors> kColorRgb = {{
    {1.0f, 0.0f, 0.0f},  // red
    {0.0f, 1.0f, 0.0f},  // green
    {0.0f, 0.0f, 1.0f},  // blue
    {1.0f, 1.0f, 0.0f},  // yellow
    {1.0f, 0.0f, 1.0f},  // magenta
    {0.0f, 1.0f, 1.0f},  // cyan
    {1.0f, 1.0f, 1.0f},  // white
    {1.0f, 0.5f, 0.0f},  // orange
}};

const char* kWebTemplates[] = {
    "a clip of a %s thing",
    "footage of something %s",
    "a video with a %s object",
    "a short clip of a %s item",
};

// Normalized shape "distance": ~0 at the pattern core, 1 near the rim.
double shape_distance(int shape_id, double dx, double dy, double r) {
    switch (shape_id) {
        case 0:  // circle
            return std::sqrt(dx * dx + dy * dy) / r;
        case 1:  // square
            return std::max(std::abs(dx), std::abs(dy)) / r;
        case 2: {  // cross
            double arm = 0.35 * r;
            double horizontal = std::max(std::abs(dx) / r, std::abs(dy) / arm);
            double vertical = std::max(std::abs(dx) / arm, std::abs(dy) / r);
            return std::min(horizontal, vertical);
        }
        case 3: {  // upward wedge
            double d1 = dy / (0.7 * r);
            double d2 = -dy / r;
            double halfwidth = 0.6 * (dy + r);
            double d3 = halfwidth > 1e-9 ? std::abs(dx) / halfwidth : 10.0;
            return std::max({d1, d2, d3});
        }
        default:
            throw DomainError("shape_id out of range");
    }
}

}  // namespace

EventSpec make_event(int class_id, int start, int end) {
    if (class_id < 0) throw DomainError("class_id must be non-negative");
    if (!(0 <= start && start < end)) throw DomainError("event span must be non-empty");
    EventSpec e;
    e.class_id = class_id;
    e.color_id = class_id % kNumColors;
    e.shape_id = class_id % kNumShapes;
    e.motion_id = class_id % kNumMotions;
    e.start = start;
    e.end = end;
    return e;
}

const EventSpec& Video::event_at(int frame_index) const {
    for (const auto& e : events) {
        if (e.covers(frame_index)) return e;
    }
    throw DomainError("no event covers frame " + std::to_string(frame_index) + " of " + video_id);
}

void CorpusSpec::validate() const {
    if (num_videos <= 0) throw DomainError("num_videos must be positive");
    if (frames_per_video < 2) throw DomainError("frames_per_video must be >= 2");
    if (class_count < 2) throw DomainError("class_count must be >= 2");
    if (noise_sigma < 0) throw DomainError("noise_sigma must be >= 0");
    if (two_event_prob < 0 || two_event_prob > 1) throw DomainError("two_event_prob in [0,1]");
    if (frame_size < 8 || frame_size % 8 != 0) throw DomainError("frame_size must be a multiple of 8");
}

double event_phase(const EventSpec& event, int frame_index) {
    if (!event.covers(frame_index)) throw DomainError("frame index outside event span");
    int len = event.end - event.start;
    if (len <= 1) return 0.5;
    return static_cast<double>(frame_index - event.start) / (len - 1);
}

Frame render_frame(const EventSpec& event, double phase, double noise_sigma, Rng& rng,
                   int frame_size) {
    if (event.color_id < 0 || event.color_id >= kNumColors) throw DomainError("color_id out of range");
    if (event.shape_id < 0 || event.shape_id >= kNumShapes) throw DomainError("shape_id out of range");
    if (event.motion_id < 0 || event.motion_id >= kNumMotions) throw DomainError("motion_id out of range");
    if (phase < 0.0 || phase > 1.0) throw DomainError("phase must be in [0,1]");

    const double scale = frame_size / 32.0;
    const double amp = 1.0 * scale;
    double cx = frame_size / 2.0;
    double cy = frame_size / 2.0;
    double r = 9.0 * scale;
    switch (event.motion_id) {
        case 0: cy = cy + amp - 2.0 * amp * phase; break;  // rising
        case 1: cy = cy - amp + 2.0 * amp * phase; break;  // falling
        case 2: cx = cx + amp - 2.0 * amp * phase; break;  // leftward
        case 3: cx = cx - amp + 2.0 * amp * phase; break;  // rightward
        case 4: r = r * (0.9 + 0.2 * phase); break;        // growing
        case 5: r = r * (1.1 - 0.2 * phase); break;        // shrinking
        default: break;
    }

    Frame frame;
    frame.height = frame.width = frame_size;
    frame.pixels.assign(static_cast<size_t>(frame_size) * frame_size * kChannels, 0.0f);
    const auto& rgb = kColorRgb[event.color_id];
    for (int y = 0; y < frame_size; ++y) {
        for (int x = 0; x < frame_size; ++x) {
            double d = shape_distance(event.shape_id, x - cx, y - cy, r);
            double intensity = std::exp(-std::pow(std::max(d, 0.0), 4.0));
            if (intensity < 1e-4) intensity = 0.0;
            for (int c = 0; c < kChannels; ++c) {
                frame.at(y, x, c) = static_cast<float>(intensity * rgb[c]);
            }
        }
    }
    if (noise_sigma > 0.0) {
        std::normal_distribution<double> noise(0.0, noise_sigma);
        for (auto& p : frame.pixels) {
            p = std::clamp(p + static_cast<float>(noise(rng)), 0.0f, 1.0f);
        }
    }
    return frame;
}

double pixel_cosine(const Frame& a, const Frame& b) {
    if (a.pixels.size() != b.pixels.size()) throw DomainError("frame shape mismatch");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.pixels.size(); ++i) {
        dot += static_cast<double>(a.pixels[i]) * b.pixels[i];
        na += static_cast<double>(a.pixels[i]) * a.pixels[i];
        nb += static_cast<double>(b.pixels[i]) * b.pixels[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / std::sqrt(na * nb);
}

Video make_video(const std::string& video_id, const std::vector<EventSpec>& events,
                 int frames_per_video, double noise_sigma, std::uint64_t seed, int frame_size) {
    Video v;
    v.video_id = video_id;
    v.events = events;
    for (int j = 0; j < frames_per_video; ++j) {
        const EventSpec& e = v.event_at(j);
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(j));
        Frame f = render_frame(e, event_phase(e, j), noise_sigma, rng, frame_size);
        f.frame_index = j;
        v.frames.push_back(std::move(f));
    }
    return v;
}

const Video& Corpus::by_id(const std::string& video_id) const {
    for (const auto& v : videos) {
        if (v.video_id == video_id) return v;
    }
    throw DomainError("unknown video_id " + video_id);
}

std::vector<const Video*> Corpus::split(const std::string& tag) const {
    std::vector<const Video*> out;
    for (size_t i = 0; i < videos.size(); ++i) {
        if (manifest.entries[i].split == tag) out.push_back(&videos[i]);
    }
    return out;
}

Corpus generate_corpus(const CorpusSpec& spec) {
    spec.validate();
    Corpus corpus;
    const int n = spec.frames_per_video;
    for (int i = 0; i < spec.num_videos; ++i) {
        std::uint64_t vid_seed = mix_seed(spec.seed, 0x1000 + i);
        Rng rng = make_rng(vid_seed, 0xabc);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::uniform_int_distribution<int> cls(0, spec.class_count - 1);

        std::vector<EventSpec> events;
        bool two = unit(rng) < spec.two_event_prob;
        if (two) {
            int c1 = cls(rng);
            int c2 = cls(rng);
            while (c2 == c1) c2 = cls(rng);
            std::uniform_int_distribution<int> cut(1, n - 1);
            int k = cut(rng);
            events.push_back(make_event(c1, 0, k));
            events.push_back(make_event(c2, k, n));
        } else {
            events.push_back(make_event(cls(rng), 0, n));
        }

        char id[32];
        std::snprintf(id, sizeof(id), "vid%05d", i);
        Video v = make_video(id, events, n, spec.noise_sigma, vid_seed, spec.frame_size);

        // Deliberately vague web caption: names only the first event's color.
        std::uniform_int_distribution<int> tmpl(0, 3);
        char caption[96];
        std::snprintf(caption, sizeof(caption), kWebTemplates[tmpl(rng)],
                      vocab::canonical_color_word(events[0].color_id));
        v.web_caption = caption;

        ManifestEntry entry;
        entry.video_id = v.video_id;
        entry.blob_path = v.video_id + ".bin";
        entry.caption = v.web_caption;
        entry.events = v.events;
        corpus.videos.push_back(std::move(v));
        corpus.manifest.entries.push_back(std::move(entry));
    }
    return corpus;
}

void split_corpus(CorpusManifest& manifest, double train_frac, double val_frac,
                  double test_frac, std::uint64_t seed) {
    if (train_frac < 0 || val_frac < 0 || test_frac < 0 ||
        std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
        throw DomainError("split fractions must be non-negative and sum to 1");
    }
    const size_t n = manifest.entries.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng = make_rng(seed, 0x5b17);
    std::shuffle(order.begin(), order.end(), rng);

    size_t n_train = static_cast<size_t>(std::llround(train_frac * static_cast<double>(n)));
    size_t n_val = static_cast<size_t>(std::llround(val_frac * static_cast<double>(n)));
    n_train = std::min(n_train, n);
    n_val = std::min(n_val, n - n_train);
    for (size_t pos = 0; pos < n; ++pos) {
        std::string tag = pos < n_train ? "train" : (pos < n_train + n_val ? "val" : "test");
        manifest.entries[order[pos]].split = tag;
    }
}

namespace {

json event_to_json(const EventSpec& e) {
    return json{{"class_id", e.class_id}, {"color_id", e.color_id}, {"shape_id", e.shape_id},
                {"motion_id", e.motion_id}, {"start", e.start}, {"end", e.end}};
}

EventSpec event_from_json(const json& j) {
    EventSpec e;
    e.class_id = j.at("class_id").get<int>();
    e.color_id = j.at("color_id").get<int>();
    e.shape_id = j.at("shape_id").get<int>();
    e.motion_id = j.at("motion_id").get<int>();
    e.start = j.at("start").get<int>();
    e.end = j.at("end").get<int>();
    return e;
}

void append_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(const std::string& buf, size_t off) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
}

}  // namespace

void write_manifest(const Corpus& corpus, const std::string& dir) {
    fs::create_directories(dir);
    json doc;
    doc["version"] = corpus.manifest.version;
    doc["entries"] = json::array();
    for (size_t i = 0; i < corpus.videos.size(); ++i) {
        const auto& entry = corpus.manifest.entries[i];
        const auto& video = corpus.videos[i];
        json je;
        je["video_id"] = entry.video_id;
        je["blob"] = entry.blob_path;
        je["caption"] = entry.caption;
        je["split"] = entry.split;
        je["events"] = json::array();
        for (const auto& e : entry.events) je["events"].push_back(event_to_json(e));
        doc["entries"].push_back(je);

        std::string buf;
        append_u32(buf, kBlobMagic);
        append_u32(buf, static_cast<std::uint32_t>(video.frames.at(0).height));
        append_u32(buf, static_cast<std::uint32_t>(video.frames.at(0).width));
        append_u32(buf, kChannels);
        for (const auto& f : video.frames) {
            const char* raw = reinterpret_cast<const char*>(f.pixels.data());
            buf.append(raw, f.pixels.size() * sizeof(float));
        }
        std::uint32_t crc = static_cast<std::uint32_t>(
            crc32(0, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(buf.size())));
        append_u32(buf, crc);

        std::ofstream blob(fs::path(dir) / entry.blob_path, std::ios::binary | std::ios::trunc);
        if (!blob) throw IoError("cannot open blob for write: " + entry.blob_path);
        blob.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
    std::string tmp = (fs::path(dir) / "manifest.json.tmp").string();
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw IoError("cannot open manifest for write in " + dir);
    out << doc.dump(2) << "\n";
    out.close();
    fs::rename(tmp, fs::path(dir) / "manifest.json");
}

std::vector<float> read_frame_blob(const std::string& path, int& height, int& width,
                                   int& frames_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open blob: " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 20) throw IntegrityError("blob too short: " + path);
    if (read_u32(buf, 0) != kBlobMagic) throw VersionError("bad blob magic: " + path);
    height = static_cast<int>(read_u32(buf, 4));
    width = static_cast<int>(read_u32(buf, 8));
    int channels = static_cast<int>(read_u32(buf, 12));
    if (channels != kChannels) throw IntegrityError("unexpected channel count: " + path);

    size_t payload = buf.size() - 20;
    size_t frame_bytes = static_cast<size_t>(height) * width * channels * sizeof(float);
    if (frame_bytes == 0 || payload % frame_bytes != 0) {
        throw IntegrityError("blob payload length mismatch: " + path);
    }
    std::uint32_t stored = read_u32(buf, buf.size() - 4);
    std::uint32_t actual = static_cast<std::uint32_t>(
        crc32(0, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(buf.size() - 4)));
    if (stored != actual) throw IntegrityError("blob checksum failure: " + path);

    frames_out = static_cast<int>(payload / frame_bytes);
    std::vector<float> pixels(payload / sizeof(float));
    std::memcpy(pixels.data(), buf.data() + 16, payload);
    return pixels;
}

Corpus read_manifest(const std::string& dir) {
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw IoError("cannot open manifest in " + dir);
    json doc = json::parse(in);
    Corpus corpus;
    std::string version = doc.at("version").get<std::string>();
    if (version != corpus.manifest.version) {
        throw VersionError("unsupported corpus version: " + version);
    }
    for (const auto& je : doc.at("entries")) {
        ManifestEntry entry;
        entry.video_id = je.at("video_id").get<std::string>();
        entry.blob_path = je.at("blob").get<std::string>();
        entry.caption = je.at("caption").get<std::string>();
        entry.split = je.at("split").get<std::string>();
        for (const auto& ev : je.at("events")) entry.events.push_back(event_from_json(ev));

        Video v;
        v.video_id = entry.video_id;
        v.web_caption = entry.caption;
        v.events = entry.events;
        int h = 0, w = 0, n = 0;
        std::vector<float> pixels =
            read_frame_blob((fs::path(dir) / entry.blob_path).string(), h, w, n);
        size_t per_frame = static_cast<size_t>(h) * w * kChannels;
        for (int j = 0; j < n; ++j) {
            Frame f;
            f.height = h;
            f.width = w;
            f.frame_index = j;
            f.pixels.assign(pixels.begin() + static_cast<long>(j * per_frame),
                            pixels.begin() + static_cast<long>((j + 1) * per_frame));
            v.frames.push_back(std::move(f));
        }
        corpus.videos.push_back(std::move(v));
        corpus.manifest.entries.push_back(std::move(entry));
    }
    return corpus;
}

}  // namespace eavtr::corpus
