#pragma once

#include <array>
#include <string>
#include <vector>

#include "eavtr/corpus.hpp"

namespace eavtr::vocab {

inline constexpr int kSynonymsPerAttribute = 3;

// Synonym pools; entry 0 of each pool is the canonical word.
using Pool = std::array<const char*, kSynonymsPerAttribute>;

inline const std::array<Pool, corpus::kNumColors>& color_pools() {
    static const std::array<Pool, corpus::kNumColors> pools = {{
        {"red", "crimson", "scarlet"},
        {"green", "emerald", "jade"},
        {"blue", "azure", "cobalt"},
        {"yellow", "golden", "amber"},
        {"magenta", "pink", "fuchsia"},
        {"cyan", "teal", "turquoise"},
        {"white", "pale", "ivory"},
        {"orange", "tangerine", "apricot"},
    }};
    return pools;
}

inline const std::array<Pool, corpus::kNumShapes>& shape_pools() {
    static const std::array<Pool, corpus::kNumShapes> pools = {{
        {"circle", "disc", "dot"},
        {"square", "box", "block"},
        {"cross", "plus", "mark"},
        {"triangle", "wedge", "arrow"},
    }};
    return pools;
}

inline const std::array<Pool, corpus::kNumMotions>& motion_pools() {
    static const std::array<Pool, corpus::kNumMotions> pools = {{
        {"rising", "ascending", "climbing"},
        {"falling", "descending", "sinking"},
        {"leftward", "retreating", "backing"},
        {"rightward", "advancing", "proceeding"},
        {"growing", "expanding", "swelling"},
        {"shrinking", "contracting", "fading"},
    }};
    return pools;
}

inline const char* canonical_color_word(int color_id) { return color_pools().at(color_id)[0]; }
inline const char* canonical_shape_word(int shape_id) { return shape_pools().at(shape_id)[0]; }
inline const char* canonical_motion_word(int motion_id) { return motion_pools().at(motion_id)[0]; }

inline constexpr const char* kSepToken = "[SEP]";
inline constexpr const char* kUnkToken = "[UNK]";

// The closed text-encoder vocabulary: every word any pipeline stage can emit.
const std::vector<std::string>& closed_vocabulary();

// Token id lookup; unknown words map to the [UNK] id.
int token_id(const std::string& word);

std::vector<int> tokenize(const std::string& text);

}  // namespace eavtr::vocab
