#include "eavtr/vocab.hpp"

#include <sstream>
#include <unordered_map>

namespace eavtr::vocab {

const std::vector<std::string>& closed_vocabulary() {
    static const std::vector<std::string> words = [] {
        std::vector<std::string> v = {kUnkToken, kSepToken};
        // Template and web-caption words.
        for (const char* w : {"a", "video", "of", "clip", "thing", "footage", "something",
                              "with", "object", "short", "item"}) {
            v.emplace_back(w);
        }
        for (const auto& pool : color_pools())
            for (const char* w : pool) v.emplace_back(w);
        for (const auto& pool : shape_pools())
            for (const char* w : pool) v.emplace_back(w);
        for (const auto& pool : motion_pools())
            for (const char* w : pool) v.emplace_back(w);
        return v;
    }();
    return words;
}

int token_id(const std::string& word) {
    static const std::unordered_map<std::string, int> index = [] {
        std::unordered_map<std::string, int> m;
        const auto& words = closed_vocabulary();
        for (size_t i = 0; i < words.size(); ++i) m.emplace(words[i], static_cast<int>(i));
        return m;
    }();
    auto it = index.find(word);
    return it == index.end() ? 0 : it->second;  // 0 is [UNK]
}

std::vector<int> tokenize(const std::string& text) {
    std::vector<int> ids;
    std::istringstream in(text);
    std::string word;
    while (in >> word) ids.push_back(token_id(word));
    return ids;
}

}  // namespace eavtr::vocab
