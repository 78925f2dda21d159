#include "bloomclf/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "bloomclf/errors.hpp"

namespace bloomclf {

namespace {

std::map<int, int> term_counts(const TokenizedText& doc, const Vocabulary& vocab) {
    std::map<int, int> counts; // ordered, so output entries are column-sorted
    for (const auto& token : doc.tokens) {
        auto it = vocab.term_to_index.find(token);
        if (it != vocab.term_to_index.end()) ++counts[it->second];
    }
    return counts;
}

void append_metrics(SparseVector& vec, int base_col, const TokenizedText& doc,
                    const std::optional<MetricScaler>& scaler) {
    auto values = transform_metrics(doc, scaler);
    for (int i = 0; i < 4; ++i) vec.entries.emplace_back(base_col + i, values[i]);
}

} // namespace

const char* to_string(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::Metrics: return "metrics";
        case FeatureMode::Tfidf: return "tfidf";
        case FeatureMode::Both: return "both";
        case FeatureMode::Counts: return "counts";
    }
    return "unknown";
}

std::optional<FeatureMode> parse_feature_mode(std::string_view name) {
    if (name == "metrics") return FeatureMode::Metrics;
    if (name == "tfidf") return FeatureMode::Tfidf;
    if (name == "both") return FeatureMode::Both;
    if (name == "counts") return FeatureMode::Counts;
    return std::nullopt;
}

const char* to_string(MetricScaling scaling) {
    return scaling == MetricScaling::Zscore ? "zscore" : "none";
}

std::optional<MetricScaling> parse_metric_scaling(std::string_view name) {
    if (name == "none") return MetricScaling::None;
    if (name == "zscore") return MetricScaling::Zscore;
    return std::nullopt;
}

void Vocabulary::rebuild_index() {
    term_to_index.clear();
    term_to_index.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) term_to_index[terms[i]] = static_cast<int>(i);
}

Vocabulary fit_vocabulary(std::span<const TokenizedText> train_docs, const FeatureConfig& config) {
    if (train_docs.empty()) raise(ErrorKind::EmptyCorpus, "no documents to fit a vocabulary on");
    if (config.min_df < 1) raise(ErrorKind::InvalidArgument, "min_df must be >= 1");

    std::map<std::string, int> df; // ordered map gives lexicographic terms directly
    std::unordered_set<std::string> seen;
    for (const auto& doc : train_docs) {
        seen.clear();
        for (const auto& token : doc.tokens) {
            if (seen.insert(token).second) ++df[token];
        }
    }

    Vocabulary vocab;
    vocab.document_count = static_cast<int>(train_docs.size());
    for (const auto& [term, count] : df) {
        if (count >= config.min_df) {
            vocab.terms.push_back(term);
            vocab.document_frequency.push_back(count);
        }
    }
    if (vocab.terms.empty()) {
        raise(ErrorKind::EmptyVocabulary,
              "no term reaches min_df=" + std::to_string(config.min_df));
    }
    vocab.rebuild_index();
    return vocab;
}

MetricScaler fit_metric_scaler(std::span<const TokenizedText> train_docs) {
    if (train_docs.empty()) raise(ErrorKind::EmptyCorpus, "no documents to fit a metric scaler on");

    MetricScaler scaler;
    const double n = static_cast<double>(train_docs.size());
    std::vector<std::array<double, 4>> rows;
    rows.reserve(train_docs.size());
    for (const auto& doc : train_docs) {
        TextMetrics m = compute_metrics(doc);
        rows.push_back({static_cast<double>(m.length_l), m.fkgl, m.ttr, m.ld});
        for (int i = 0; i < 4; ++i) scaler.mean[i] += rows.back()[i];
    }
    for (int i = 0; i < 4; ++i) scaler.mean[i] /= n;
    for (const auto& row : rows) {
        for (int i = 0; i < 4; ++i) {
            const double d = row[i] - scaler.mean[i];
            scaler.stddev[i] += d * d;
        }
    }
    for (int i = 0; i < 4; ++i) scaler.stddev[i] = std::sqrt(scaler.stddev[i] / n);
    return scaler;
}

SparseVector transform_tfidf(const TokenizedText& doc, const Vocabulary& vocab,
                             const FeatureConfig& config) {
    SparseVector vec;
    double norm_sq = 0.0;
    const double n_docs = static_cast<double>(vocab.document_count);
    for (const auto& [col, count] : term_counts(doc, vocab)) {
        double tf = config.sublinear_tf ? 1.0 + std::log(static_cast<double>(count))
                                        : static_cast<double>(count);
        double idf = std::log((1.0 + n_docs) /
                              (1.0 + static_cast<double>(vocab.document_frequency[col]))) + 1.0;
        double value = tf * idf;
        vec.entries.emplace_back(col, value);
        norm_sq += value * value;
    }
    if (norm_sq > 0.0) {
        const double inv_norm = 1.0 / std::sqrt(norm_sq);
        for (auto& [col, value] : vec.entries) value *= inv_norm;
    }
    return vec;
}

SparseVector transform_counts(const TokenizedText& doc, const Vocabulary& vocab) {
    SparseVector vec;
    for (const auto& [col, count] : term_counts(doc, vocab)) {
        vec.entries.emplace_back(col, static_cast<double>(count));
    }
    return vec;
}

std::array<double, 4> transform_metrics(const TokenizedText& doc,
                                        const std::optional<MetricScaler>& scaler) {
    TextMetrics m = compute_metrics(doc);
    std::array<double, 4> values = {static_cast<double>(m.length_l), m.fkgl, m.ttr, m.ld};
    if (scaler) {
        for (int i = 0; i < 4; ++i) {
            const double std = scaler->stddev[i] < 1e-12 ? 1.0 : scaler->stddev[i];
            values[i] = (values[i] - scaler->mean[i]) / std;
        }
    }
    return values;
}

FittedFeatures fit_features(std::span<const TokenizedText> train_docs, const FeatureConfig& config) {
    FittedFeatures fitted;
    fitted.config = config;

    const bool wants_vocab = config.mode != FeatureMode::Metrics;
    const bool wants_metrics = config.mode == FeatureMode::Metrics || config.mode == FeatureMode::Both;

    if (wants_vocab) fitted.vocab = fit_vocabulary(train_docs, config);
    if (wants_metrics && config.metric_scaling == MetricScaling::Zscore) {
        fitted.scaler = fit_metric_scaler(train_docs);
    }

    switch (config.mode) {
        case FeatureMode::Metrics: fitted.dim = 4; break;
        case FeatureMode::Tfidf:
        case FeatureMode::Counts: fitted.dim = fitted.vocab.size(); break;
        case FeatureMode::Both: fitted.dim = fitted.vocab.size() + 4; break;
    }
    return fitted;
}

SparseVector featurize(const TokenizedText& doc, const FittedFeatures& fitted) {
    switch (fitted.config.mode) {
        case FeatureMode::Metrics: {
            SparseVector vec;
            append_metrics(vec, 0, doc, fitted.scaler);
            return vec;
        }
        case FeatureMode::Tfidf:
            return transform_tfidf(doc, fitted.vocab, fitted.config);
        case FeatureMode::Counts:
            return transform_counts(doc, fitted.vocab);
        case FeatureMode::Both: {
            SparseVector vec = transform_tfidf(doc, fitted.vocab, fitted.config);
            append_metrics(vec, fitted.vocab.size(), doc, fitted.scaler);
            return vec;
        }
    }
    raise(ErrorKind::InvalidArgument, "unknown feature mode");
}

FeatureMatrix transform_all(std::span<const TokenizedText> docs, const FittedFeatures& fitted) {
    FeatureMatrix matrix;
    matrix.rows = docs.size();
    matrix.cols = fitted.dim;
    matrix.row_data.reserve(docs.size());
    for (const auto& doc : docs) matrix.row_data.push_back(featurize(doc, fitted));
    return matrix;
}

} // namespace bloomclf
