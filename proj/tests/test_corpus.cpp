#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "eavtr/corpus.hpp"

using namespace eavtr;
namespace fs = std::filesystem;

namespace {

bool frames_equal(const corpus::Frame& a, const corpus::Frame& b) {
    return a.height == b.height && a.width == b.width && a.pixels == b.pixels;
}

fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("eavtr_corpus_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("render_frame is deterministic") {
    auto e = corpus::make_event(0, 0, 4);
    Rng r1 = make_rng(7), r2 = make_rng(7);
    auto f1 = corpus::render_frame(e, 0.0, 0.0, r1);
    auto f2 = corpus::render_frame(e, 0.0, 0.0, r2);
    CHECK(frames_equal(f1, f2));
}

TEST_CASE("nearby phases of one class are closer than another class") {
    auto e0 = corpus::make_event(0, 0, 4);
    auto e1 = corpus::make_event(1, 0, 4);
    Rng rng = make_rng(7);
    auto a = corpus::render_frame(e0, 0.0, 0.0, rng);
    auto b = corpus::render_frame(e0, 0.25, 0.0, rng);
    double same = corpus::pixel_cosine(a, b);
    for (double phase : {0.0, 0.5, 1.0}) {
        auto c = corpus::render_frame(e1, phase, 0.0, rng);
        CHECK(same > corpus::pixel_cosine(a, c));
    }
}

TEST_CASE("noisy pixels stay clamped to [0,1]") {
    auto e = corpus::make_event(3, 0, 4);
    Rng rng = make_rng(11);
    auto f = corpus::render_frame(e, 0.5, 0.02, rng);
    for (float p : f.pixels) {
        CHECK(p >= 0.0f);
        CHECK(p <= 1.0f);
    }
}

TEST_CASE("invalid class components are rejected") {
    corpus::EventSpec e = corpus::make_event(0, 0, 4);
    e.color_id = corpus::kNumColors;
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(corpus::render_frame(e, 0.0, 0.0, rng), DomainError);
    CHECK_THROWS_AS(corpus::render_frame(corpus::make_event(0, 0, 4), 1.5, 0.0, rng), DomainError);
}

TEST_CASE("make_event derives the palette triple from class id") {
    auto e = corpus::make_event(13, 1, 3);
    CHECK(e.color_id == 13 % corpus::kNumColors);
    CHECK(e.shape_id == 13 % corpus::kNumShapes);
    CHECK(e.motion_id == 13 % corpus::kNumMotions);
    CHECK(e.start == 1);
    CHECK(e.end == 3);
}

TEST_CASE("generate_corpus is deterministic and structurally valid") {
    corpus::CorpusSpec spec;
    spec.num_videos = 64;
    spec.frames_per_video = 4;
    spec.class_count = 8;
    spec.seed = 1;

    auto c1 = corpus::generate_corpus(spec);
    auto c2 = corpus::generate_corpus(spec);
    REQUIRE(c1.videos.size() == 64);
    REQUIRE(c2.videos.size() == 64);
    for (size_t i = 0; i < c1.videos.size(); ++i) {
        const auto& a = c1.videos[i];
        const auto& b = c2.videos[i];
        CHECK(a.video_id == b.video_id);
        CHECK(a.web_caption == b.web_caption);
        REQUIRE(a.frames.size() == 4);
        for (int j = 0; j < 4; ++j) {
            CHECK(a.frames[j].frame_index == j);
            CHECK(frames_equal(a.frames[j], b.frames[j]));
        }
        // spans disjoint, ordered, covering [0, N)
        int cursor = 0;
        for (const auto& ev : a.events) {
            CHECK(ev.start == cursor);
            CHECK(ev.end > ev.start);
            cursor = ev.end;
        }
        CHECK(cursor == 4);
    }
}

TEST_CASE("events_per_video extremes") {
    corpus::CorpusSpec spec;
    spec.num_videos = 16;
    spec.seed = 5;

    spec.two_event_prob = 0.0;
    for (const auto& v : corpus::generate_corpus(spec).videos) {
        REQUIRE(v.events.size() == 1);
        CHECK(v.events[0].start == 0);
        CHECK(v.events[0].end == 4);
    }

    spec.two_event_prob = 1.0;
    for (const auto& v : corpus::generate_corpus(spec).videos) {
        REQUIRE(v.events.size() == 2);
        CHECK(v.events[0].end == v.events[1].start);
        CHECK(v.events[1].end == 4);
        CHECK(v.events[0].class_id != v.events[1].class_id);
    }
}

TEST_CASE("split_corpus partitions deterministically") {
    corpus::CorpusSpec spec;
    spec.num_videos = 64;
    spec.seed = 2;
    auto c = corpus::generate_corpus(spec);

    corpus::split_corpus(c.manifest, 0.5, 0.25, 0.25, 9);
    int train = 0, val = 0, test = 0;
    for (const auto& e : c.manifest.entries) {
        train += e.split == "train";
        val += e.split == "val";
        test += e.split == "test";
    }
    CHECK(train == 32);
    CHECK(val == 16);
    CHECK(test == 16);

    auto again = corpus::generate_corpus(spec);
    corpus::split_corpus(again.manifest, 0.5, 0.25, 0.25, 9);
    for (size_t i = 0; i < c.manifest.entries.size(); ++i) {
        CHECK(c.manifest.entries[i].split == again.manifest.entries[i].split);
    }

    corpus::split_corpus(c.manifest, 1.0, 0.0, 0.0, 9);
    for (const auto& e : c.manifest.entries) CHECK(e.split == "train");

    CHECK_THROWS_AS(corpus::split_corpus(c.manifest, 0.5, 0.5, 0.5, 9), DomainError);
}

TEST_CASE("manifest round-trip is bit exact") {
    corpus::CorpusSpec spec;
    spec.num_videos = 4;
    spec.seed = 3;
    spec.two_event_prob = 1.0;
    auto c = corpus::generate_corpus(spec);
    auto dir = temp_dir("roundtrip");
    corpus::write_manifest(c, dir.string());

    auto back = corpus::read_manifest(dir.string());
    REQUIRE(back.videos.size() == c.videos.size());
    for (size_t i = 0; i < c.videos.size(); ++i) {
        CHECK(back.videos[i].video_id == c.videos[i].video_id);
        CHECK(back.videos[i].web_caption == c.videos[i].web_caption);
        REQUIRE(back.videos[i].events.size() == c.videos[i].events.size());
        for (size_t k = 0; k < c.videos[i].events.size(); ++k) {
            CHECK(back.videos[i].events[k].class_id == c.videos[i].events[k].class_id);
            CHECK(back.videos[i].events[k].start == c.videos[i].events[k].start);
            CHECK(back.videos[i].events[k].end == c.videos[i].events[k].end);
        }
        for (int j = 0; j < 4; ++j) CHECK(frames_equal(back.videos[i].frames[j], c.videos[i].frames[j]));
    }
    fs::remove_all(dir);
}

TEST_CASE("corrupted blob raises an integrity error") {
    corpus::CorpusSpec spec;
    spec.num_videos = 2;
    spec.seed = 4;
    auto c = corpus::generate_corpus(spec);
    auto dir = temp_dir("corrupt");
    corpus::write_manifest(c, dir.string());

    SUBCASE("truncated blob") {
        const fs::path blob = dir / c.manifest.entries[0].blob_path;
        fs::resize_file(blob, fs::file_size(blob) / 2);
        CHECK_THROWS_AS(corpus::read_manifest(dir.string()), IntegrityError);
    }
    SUBCASE("flipped payload byte fails the checksum") {
        const fs::path blob = dir / c.manifest.entries[0].blob_path;
        std::fstream f(blob, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(64);
        char b = 0;
        f.read(&b, 1);
        f.seekp(64);
        b = static_cast<char>(b ^ 0x5a);
        f.write(&b, 1);
        f.close();
        CHECK_THROWS_AS(corpus::read_manifest(dir.string()), IntegrityError);
    }
    SUBCASE("unknown manifest version") {
        std::ifstream in(dir / "manifest.json");
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        auto pos = text.find("eavtr-corpus-v1");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 15, "eavtr-corpus-99");
        std::ofstream out(dir / "manifest.json", std::ios::trunc);
        out << text;
        out.close();
        CHECK_THROWS_AS(corpus::read_manifest(dir.string()), VersionError);
    }
    fs::remove_all(dir);
}

TEST_CASE("written corpora are byte-identical across runs") {
    corpus::CorpusSpec spec;
    spec.num_videos = 6;
    spec.seed = 21;
    auto d1 = temp_dir("bytes1");
    auto d2 = temp_dir("bytes2");
    corpus::write_manifest(corpus::generate_corpus(spec), d1.string());
    corpus::write_manifest(corpus::generate_corpus(spec), d2.string());
    for (const auto& entry : fs::directory_iterator(d1)) {
        std::ifstream a(entry.path(), std::ios::binary);
        std::ifstream b(d2 / entry.path().filename(), std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("event separability: intra-class cosine beats inter-class") {
    double intra = 0.0, inter = 0.0;
    int n_intra = 0, n_inter = 0;
    Rng rng = make_rng(17);
    std::vector<corpus::Frame> frames;
    std::vector<int> cls;
    for (int c = 0; c < 10; ++c) {
        for (int k = 0; k < 10; ++k) {
            auto e = corpus::make_event(c * 7 % 192, 0, 4);
            frames.push_back(corpus::render_frame(e, k / 9.0, 0.05, rng));
            cls.push_back(c);
        }
    }
    for (size_t i = 0; i < frames.size(); ++i) {
        for (size_t j = i + 1; j < frames.size(); ++j) {
            double s = corpus::pixel_cosine(frames[i], frames[j]);
            if (cls[i] == cls[j]) {
                intra += s;
                ++n_intra;
            } else {
                inter += s;
                ++n_inter;
            }
        }
    }
    CHECK(intra / n_intra > inter / n_inter);
}

TEST_CASE("event_at resolves the covering event") {
    corpus::Video v = corpus::make_video(
        "v", {corpus::make_event(0, 0, 2), corpus::make_event(9, 2, 4)}, 4, 0.0, 1);
    CHECK(v.event_at(0).class_id == 0);
    CHECK(v.event_at(1).class_id == 0);
    CHECK(v.event_at(2).class_id == 9);
    CHECK(v.event_at(3).class_id == 9);
    CHECK_THROWS_AS(v.event_at(4), DomainError);
}
