#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace bloomclf {

// Token-level decomposition of one question text. Tokens are maximal runs of
// ASCII alphanumerics plus internal apostrophes, lowercased. Parallel arrays:
// syllable_counts[i] and content_flags[i] describe tokens[i].
struct TokenizedText {
    std::vector<std::string> tokens;
    int sentence_count = 0;
    std::vector<int> syllable_counts;
    std::vector<bool> content_flags;
};

// The four per-question measures: word count, Flesch-Kincaid grade level,
// type-token ratio, lexical density.
struct TextMetrics {
    int length_l = 0;
    double fkgl = 0.0;
    double ttr = 0.0;
    double ld = 0.0;
};

// Throws Error(EmptyText) when the text contains no token.
TokenizedText tokenize(std::string_view text);

// Vowel-group counting over {a,e,i,o,u,y} with a silent trailing 'e'
// subtracted (unless the word ends in consonant+"le"); clamped to >= 1.
int count_syllables(std::string_view word);

// False iff the word is in the embedded stopword list. The list ships as
// data/stopwords.txt and is baked in at build time; its exact content is part
// of the lexical-density contract.
bool is_content_word(std::string_view word);

const std::unordered_set<std::string>& stopwords();

TextMetrics compute_metrics(const TokenizedText& text);

// tokenize + compute_metrics in one call.
TextMetrics compute_metrics(std::string_view text);

} // namespace bloomclf
