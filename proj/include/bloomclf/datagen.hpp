#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bloomclf/dataset.hpp"

namespace bloomclf {

// Level-tagged action verbs, sentence templates ({verb}/{topic} slots) and a
// shared topic pool. Verbs are disjoint across levels so generated corpora
// carry a learnable signal, and mean template length must rise strictly with
// the level so generated corpora reproduce the question-length trend.
struct Banks {
    std::array<std::vector<std::string>, kBloomLevelCount> verbs;
    std::array<std::vector<std::string>, kBloomLevelCount> templates;
    std::vector<std::string> topics;
};

// Copy of the checked-in bank file embedded at build time.
Banks default_banks();

// Lines are `LEVEL<TAB>entry` or `TOPIC<TAB>phrase`; '#' starts a comment.
// An entry containing slots is a template, otherwise a verb.
Banks parse_banks(std::string_view text);
Banks load_banks(const std::string& path);

struct GenerationResult {
    std::vector<QuestionRecord> records;
    // True when some level needed more records than it has distinct
    // (verb, template, topic) triples, so duplicates were emitted.
    bool space_exhausted = false;
};

GenerationResult generate(int n_per_level, std::uint64_t seed, const Banks& banks);

}  // namespace bloomclf
