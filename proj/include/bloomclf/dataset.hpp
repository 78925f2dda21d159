#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bloomclf {

// The six original-taxonomy levels, ordered from lowest to highest cognitive
// demand. Revised-taxonomy names (Remembering, ...) are rejected on load.
enum class BloomLevel {
    Knowledge = 0,
    Comprehension,
    Application,
    Analysis,
    Synthesis,
    Evaluation,
};

inline constexpr int kBloomLevelCount = 6;

constexpr std::array<BloomLevel, kBloomLevelCount> all_bloom_levels() {
    return {BloomLevel::Knowledge,   BloomLevel::Comprehension, BloomLevel::Application,
            BloomLevel::Analysis,    BloomLevel::Synthesis,     BloomLevel::Evaluation};
}

const char* to_string(BloomLevel level);

// Case-insensitive match against the six level names.
std::optional<BloomLevel> parse_bloom_level(std::string_view name);

struct QuestionRecord {
    std::string text;
    BloomLevel level;
};

// Surjective mapping from the six levels onto a coarser class set. Class
// indices follow level order, so index 0 is always Knowledge and coarse
// classes sit where their lowest member does.
struct LabelScheme {
    std::string name;
    std::array<int, kBloomLevelCount> level_to_class;
    std::vector<std::string> class_names;

    int class_count() const { return static_cast<int>(class_names.size()); }

    static LabelScheme full6();
    static LabelScheme merged4(); // Analysis+Synthesis+Evaluation -> Higher-Order
    static LabelScheme merged3(); // additionally Comprehension+Application -> Mid-Order
    static std::optional<LabelScheme> by_name(std::string_view name);

    bool operator==(const LabelScheme&) const = default;
};

int apply_scheme(BloomLevel level, const LabelScheme& scheme);

struct SplitDataset {
    std::vector<QuestionRecord> train;
    std::vector<QuestionRecord> validation;
    std::uint64_t seed = 0;
    double fraction = 0.0;
};

enum class CorpusFormat { Csv, Jsonl };

// CSV: header "text,label", RFC-4180 quoting. JSONL: one object per line with
// string fields "text" and "label". Throws IoError, ParseError (with the
// 1-based row/line number), UnknownLabel, or EmptyCorpus.
std::vector<QuestionRecord> load_corpus(const std::filesystem::path& path, CorpusFormat format);

// Infers the format from the file extension (.csv / .jsonl).
std::vector<QuestionRecord> load_corpus(const std::filesystem::path& path);

void write_corpus_csv(const std::filesystem::path& path, const std::vector<QuestionRecord>& corpus);

// Counts per level, indexed by static_cast<int>(BloomLevel).
std::array<std::size_t, kBloomLevelCount> class_distribution(const std::vector<QuestionRecord>& corpus);

// Seeded downsampling without replacement to the minimum class count among
// the levels present. Output preserves input order.
std::vector<QuestionRecord> balance(const std::vector<QuestionRecord>& corpus, std::uint64_t seed);

// Per level, floor(fraction * count) records (at least 1) go to validation,
// the rest to train, chosen by seeded shuffle. Throws ClassTooSmall when a
// present level has fewer than 2 records.
SplitDataset stratified_split(const std::vector<QuestionRecord>& corpus, double fraction,
                              std::uint64_t seed);

} // namespace bloomclf
