#include "bloomclf/textmetrics.hpp"

#include <cctype>
#include <sstream>

#include "bloomclf/errors.hpp"
#include "bloomclf/generated/stopwords_data.hpp"

namespace bloomclf {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

} // namespace

const std::unordered_set<std::string>& stopwords() {
    static const std::unordered_set<std::string> words = [] {
        std::unordered_set<std::string> set;
        std::istringstream in(detail::kStopwordsData);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) set.insert(line);
        }
        return set;
    }();
    return words;
}

bool is_content_word(std::string_view word) {
    return stopwords().count(std::string(word)) == 0;
}

int count_syllables(std::string_view word) {
    int groups = 0;
    bool in_group = false;
    for (char c : word) {
        if (is_vowel(c)) {
            if (!in_group) ++groups;
            in_group = true;
        } else {
            in_group = false;
        }
    }
    // Silent trailing 'e': drop one group unless the word ends in
    // consonant+"le" or the subtraction would empty the count.
    std::size_t n = word.size();
    if (n >= 2 && word[n - 1] == 'e' && groups >= 2) {
        bool consonant_le = n >= 3 && word[n - 2] == 'l' && !is_vowel(word[n - 3]);
        if (!consonant_le) --groups;
    }
    return groups >= 1 ? groups : 1;
}

TokenizedText tokenize(std::string_view text) {
    TokenizedText result;

    std::string current;
    int sentences = 0;
    bool segment_has_token = false;

    auto flush_token = [&] {
        if (current.empty()) return;
        result.tokens.push_back(current);
        segment_has_token = true;
        current.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (is_word_char(c)) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (c == '\'' && !current.empty() && i + 1 < text.size() && is_word_char(text[i + 1])) {
            current.push_back('\'');
        } else {
            flush_token();
            if (c == '.' || c == '!' || c == '?') {
                if (segment_has_token) ++sentences;
                segment_has_token = false;
            }
        }
    }
    flush_token();
    if (segment_has_token) ++sentences;

    if (result.tokens.empty()) raise(ErrorKind::EmptyText, "text contains no word token");
    result.sentence_count = sentences >= 1 ? sentences : 1;

    result.syllable_counts.reserve(result.tokens.size());
    result.content_flags.reserve(result.tokens.size());
    for (const auto& token : result.tokens) {
        result.syllable_counts.push_back(count_syllables(token));
        result.content_flags.push_back(is_content_word(token));
    }
    return result;
}

TextMetrics compute_metrics(const TokenizedText& text) {
    if (text.tokens.empty()) raise(ErrorKind::EmptyText, "tokenized text has no tokens");

    const double n_words = static_cast<double>(text.tokens.size());
    const double n_sentences = static_cast<double>(text.sentence_count);

    long long n_syllables = 0;
    for (int s : text.syllable_counts) n_syllables += s;

    std::unordered_set<std::string_view> unique(text.tokens.begin(), text.tokens.end());

    long long n_content = 0;
    for (bool flag : text.content_flags) n_content += flag ? 1 : 0;

    TextMetrics metrics;
    metrics.length_l = static_cast<int>(text.tokens.size());
    metrics.fkgl = 0.39 * (n_words / n_sentences) +
                   11.8 * (static_cast<double>(n_syllables) / n_words) - 15.59;
    metrics.ttr = static_cast<double>(unique.size()) / n_words;
    metrics.ld = static_cast<double>(n_content) / n_words;
    return metrics;
}

TextMetrics compute_metrics(std::string_view text) {
    return compute_metrics(tokenize(text));
}

} // namespace bloomclf
