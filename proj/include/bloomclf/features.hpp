#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "bloomclf/textmetrics.hpp"

namespace bloomclf {

// How question texts become numeric vectors. Counts is the multinomial
// naive-Bayes representation (raw term counts over the fitted vocabulary).
enum class FeatureMode { Metrics, Tfidf, Both, Counts };

const char* to_string(FeatureMode mode);
std::optional<FeatureMode> parse_feature_mode(std::string_view name);

enum class MetricScaling { None, Zscore };

const char* to_string(MetricScaling scaling);
std::optional<MetricScaling> parse_metric_scaling(std::string_view name);

struct FeatureConfig {
    FeatureMode mode = FeatureMode::Tfidf;
    bool sublinear_tf = false;
    int min_df = 1;
    MetricScaling metric_scaling = MetricScaling::Zscore;

    bool operator==(const FeatureConfig&) const = default;
};

// Terms are stored lexicographically, so column order is stable across runs
// regardless of hash-map iteration order.
struct Vocabulary {
    std::vector<std::string> terms;
    std::vector<int> document_frequency;
    int document_count = 0;

    std::unordered_map<std::string, int> term_to_index;

    int size() const { return static_cast<int>(terms.size()); }
    void rebuild_index();
};

// Train-set mean/stddev for the four metrics, in (L, FKGL, TTR, LD) order.
// Stddevs below 1e-12 are replaced by 1 at transform time.
struct MetricScaler {
    std::array<double, 4> mean{};
    std::array<double, 4> stddev{};
};

struct SparseVector {
    std::vector<std::pair<int, double>> entries; // sorted by column
};

struct FeatureMatrix {
    std::size_t rows = 0;
    int cols = 0;
    std::vector<SparseVector> row_data;
};

// Everything needed to transform unseen documents exactly as the train set
// was transformed; serialized inside model files.
struct FittedFeatures {
    FeatureConfig config;
    Vocabulary vocab;                   // empty in Metrics mode
    std::optional<MetricScaler> scaler; // set when metrics are z-scored
    int dim = 0;
};

Vocabulary fit_vocabulary(std::span<const TokenizedText> train_docs, const FeatureConfig& config);

MetricScaler fit_metric_scaler(std::span<const TokenizedText> train_docs);

// tf(t) * idf(t) with tf = raw count (or 1 + ln count when sublinear_tf) and
// idf = ln((1 + N) / (1 + df)) + 1, L2-normalized. Out-of-vocabulary terms
// are ignored; an all-OOV document yields the zero vector.
SparseVector transform_tfidf(const TokenizedText& doc, const Vocabulary& vocab,
                             const FeatureConfig& config);

// Raw term counts over the vocabulary (naive-Bayes input).
SparseVector transform_counts(const TokenizedText& doc, const Vocabulary& vocab);

// [L, FKGL, TTR, LD], z-scored with train statistics when a scaler is given.
std::array<double, 4> transform_metrics(const TokenizedText& doc,
                                        const std::optional<MetricScaler>& scaler);

FittedFeatures fit_features(std::span<const TokenizedText> train_docs, const FeatureConfig& config);

SparseVector featurize(const TokenizedText& doc, const FittedFeatures& fitted);

FeatureMatrix transform_all(std::span<const TokenizedText> docs, const FittedFeatures& fitted);

} // namespace bloomclf
