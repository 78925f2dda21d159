#include "bloomclf/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "bloomclf/errors.hpp"
#include "bloomclf/rng.hpp"
#include "bloomclf/generated/banks_data.hpp"

namespace bloomclf {

namespace {

std::string trim(std::string_view s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::size_t count_occurrences(const std::string& text, std::string_view needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::size_t word_count(const std::string& text) {
    std::istringstream in(text);
    std::string word;
    std::size_t n = 0;
    while (in >> word) ++n;
    return n;
}

void validate_banks(const Banks& banks) {
    std::unordered_set<std::string> seen_verbs;
    for (BloomLevel level : all_bloom_levels()) {
        for (const std::string& verb : banks.verbs[static_cast<std::size_t>(level)]) {
            if (!seen_verbs.insert(verb).second) {
                raise(ErrorKind::ParseError,
                      "verb \"" + verb + "\" appears in more than one level's bank");
            }
        }
    }
    // Templates must get strictly longer level by level (slots count as one
    // word each; topics are drawn from the shared pool, so their expected
    // contribution is identical across levels).
    double prev_mean = 0.0;
    for (BloomLevel level : all_bloom_levels()) {
        const auto& templates = banks.templates[static_cast<std::size_t>(level)];
        if (templates.empty()) continue;
        double total = 0.0;
        for (const std::string& tpl : templates) {
            total += static_cast<double>(word_count(tpl));
        }
        double mean = total / static_cast<double>(templates.size());
        if (level != BloomLevel::Knowledge && mean <= prev_mean) {
            raise(ErrorKind::ParseError,
                  std::string("mean template length for ") + to_string(level) +
                      " does not exceed the previous level's");
        }
        prev_mean = mean;
    }
}

}  // namespace

Banks parse_banks(std::string_view text) {
    Banks banks;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line_view =
            text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string line = trim(line_view);
        if (line.empty() || line[0] == '#') continue;

        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            raise(ErrorKind::ParseError,
                  "line " + std::to_string(line_no) + ": expected LEVEL<TAB>entry");
        }
        std::string tag = trim(line.substr(0, tab));
        std::string entry = trim(line.substr(tab + 1));
        if (entry.empty()) {
            raise(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": empty entry");
        }

        std::size_t verb_slots = count_occurrences(entry, "{verb}");
        std::size_t topic_slots = count_occurrences(entry, "{topic}");
        if (tag == "TOPIC") {
            if (verb_slots + topic_slots != 0) {
                raise(ErrorKind::ParseError,
                      "line " + std::to_string(line_no) + ": topic phrases cannot contain slots");
            }
            banks.topics.push_back(entry);
            continue;
        }
        auto level = parse_bloom_level(tag);
        if (!level) {
            raise(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": unknown tag \"" +
                                             tag + "\"");
        }
        if (verb_slots + topic_slots == 0) {
            banks.verbs[static_cast<std::size_t>(*level)].push_back(entry);
        } else {
            if (verb_slots != 1 || topic_slots != 1) {
                raise(ErrorKind::ParseError,
                      "line " + std::to_string(line_no) +
                          ": template needs exactly one {verb} and one {topic} slot");
            }
            banks.templates[static_cast<std::size_t>(*level)].push_back(entry);
        }
    }
    validate_banks(banks);
    return banks;
}

Banks load_banks(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_banks(buffer.str());
}

Banks default_banks() { return parse_banks(detail::kBanksData); }

namespace {

std::string render(const std::string& tpl, const std::string& verb, const std::string& topic) {
    std::string out = tpl;
    out.replace(out.find("{verb}"), 6, verb);
    out.replace(out.find("{topic}"), 7, topic);
    if (!out.empty()) {
        out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    }
    return out;
}

}  // namespace

GenerationResult generate(int n_per_level, std::uint64_t seed, const Banks& banks) {
    if (n_per_level < 1) {
        raise(ErrorKind::InvalidArgument, "n_per_level must be at least 1");
    }
    if (banks.topics.empty()) raise(ErrorKind::EmptyBank, "topic pool is empty");
    for (BloomLevel level : all_bloom_levels()) {
        if (banks.verbs[static_cast<std::size_t>(level)].empty()) {
            raise(ErrorKind::EmptyBank, std::string("no verbs for level ") + to_string(level));
        }
        if (banks.templates[static_cast<std::size_t>(level)].empty()) {
            raise(ErrorKind::EmptyBank,
                  std::string("no templates for level ") + to_string(level));
        }
    }

    GenerationResult result;
    result.records.reserve(static_cast<std::size_t>(n_per_level) * kBloomLevelCount);
    Rng rng(seed);
    for (BloomLevel level : all_bloom_levels()) {
        const auto& verbs = banks.verbs[static_cast<std::size_t>(level)];
        const auto& templates = banks.templates[static_cast<std::size_t>(level)];
        const std::size_t capacity = verbs.size() * templates.size() * banks.topics.size();
        std::unordered_set<std::uint64_t> used;
        for (int i = 0; i < n_per_level; ++i) {
            std::size_t v = 0, t = 0, p = 0;
            if (used.size() >= capacity) {
                result.space_exhausted = true;
                v = draw_index(rng, verbs.size());
                t = draw_index(rng, templates.size());
                p = draw_index(rng, banks.topics.size());
            } else {
                for (;;) {
                    v = draw_index(rng, verbs.size());
                    t = draw_index(rng, templates.size());
                    p = draw_index(rng, banks.topics.size());
                    std::uint64_t key =
                        (static_cast<std::uint64_t>(v) * templates.size() + t) *
                            banks.topics.size() +
                        p;
                    if (used.insert(key).second) break;
                }
            }
            result.records.push_back(
                QuestionRecord{render(templates[t], verbs[v], banks.topics[p]), level});
        }
    }
    return result;
}

}  // namespace bloomclf
