#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bloomclf/dataset.hpp"

namespace bloomclf {

struct ConfusionMatrix {
    int classes = 0;
    std::vector<std::size_t> counts;  // row-major; rows = gold, cols = predicted

    std::size_t& at(int gold, int pred) {
        return counts[static_cast<std::size_t>(gold) * classes + pred];
    }
    std::size_t at(int gold, int pred) const {
        return counts[static_cast<std::size_t>(gold) * classes + pred];
    }
    std::size_t total() const;
    std::size_t trace() const;

    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> predicted,
                          int class_count);

struct ClassMetrics {
    std::string name;
    std::size_t support = 0;  // gold occurrences
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    bool operator==(const ClassMetrics&) const = default;
};

struct ClassificationReport {
    std::vector<std::string> class_names;
    ConfusionMatrix matrix;
    std::vector<ClassMetrics> per_class;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    // Zero-division cases (a class never predicted, or absent from gold)
    // score 0 and are recorded here instead of silently passing.
    std::vector<std::string> warnings;

    bool operator==(const ClassificationReport&) const = default;
};

// Structured form: stable key order, full double precision; parses back to
// an equal report.
std::string report_to_json(const ClassificationReport& report);
ClassificationReport report_from_json(const std::string& text);

ClassificationReport evaluate_confusion(const ConfusionMatrix& matrix,
                                        const std::vector<std::string>& class_names);
ClassificationReport evaluate(std::span<const int> gold, std::span<const int> predicted,
                              const LabelScheme& scheme);

// Mapping from fine class index to coarse class index, derived from the two
// schemes' level maps. NotACoarsening when no consistent mapping exists.
std::vector<int> coarsen_map(const LabelScheme& fine, const LabelScheme& coarse);

ConfusionMatrix merge_confusion(const ConfusionMatrix& fine_matrix,
                                const LabelScheme& fine, const LabelScheme& coarse);

// Absent (nullopt) when either input has zero variance. InsufficientData for
// fewer than two points, LengthMismatch when the spans differ in length.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct LevelStats {
    std::string name;
    std::size_t count = 0;
    std::array<double, 4> mean{};    // L, FKGL, TTR, LD
    std::array<double, 4> stddev{};  // population stddev
};

struct CorpusStats {
    std::vector<LevelStats> per_level;  // present levels in canonical order
    LevelStats overall;
    std::optional<double> pearson_l_fkgl;  // across individual questions
};

CorpusStats corpus_stats(std::span<const QuestionRecord> records);

// Level/Precision/Recall/F1-score table plus a trailing Accuracy row, class
// rows in descending cognitive order, two decimals.
std::string classification_table_markdown(const ClassificationReport& report);

std::string confusion_markdown(const ClassificationReport& report);

struct ComparativeRow {
    std::string experiment;
    std::string method;
    double accuracy = 0.0;
    std::string notes;
};

std::string comparative_markdown(std::span<const ComparativeRow> rows);

std::string corpus_stats_markdown(const CorpusStats& stats);

}  // namespace bloomclf
