#include "bloomclf/eval.hpp"

#include <cmath>
#include <numeric>

#include "bloomclf/errors.hpp"
#include "bloomclf/textmetrics.hpp"

namespace bloomclf {

std::size_t ConfusionMatrix::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t sum = 0;
    for (int c = 0; c < classes; ++c) sum += at(c, c);
    return sum;
}

ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> predicted,
                          int class_count) {
    if (gold.size() != predicted.size()) {
        raise(ErrorKind::LengthMismatch,
              std::to_string(gold.size()) + " gold labels vs " +
                  std::to_string(predicted.size()) + " predictions");
    }
    if (class_count < 1) raise(ErrorKind::InvalidArgument, "class_count must be positive");
    ConfusionMatrix m;
    m.classes = class_count;
    m.counts.assign(static_cast<std::size_t>(class_count) * class_count, 0);
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] < 0 || gold[i] >= class_count || predicted[i] < 0 ||
            predicted[i] >= class_count) {
            raise(ErrorKind::IndexOutOfRange,
                  "label pair (" + std::to_string(gold[i]) + ", " +
                      std::to_string(predicted[i]) + ") at position " + std::to_string(i) +
                      " outside [0, " + std::to_string(class_count) + ")");
        }
        ++m.at(gold[i], predicted[i]);
    }
    return m;
}

ClassificationReport evaluate_confusion(const ConfusionMatrix& matrix,
                                        const std::vector<std::string>& class_names) {
    if (matrix.classes != static_cast<int>(class_names.size())) {
        raise(ErrorKind::LengthMismatch, "confusion matrix has " +
                                             std::to_string(matrix.classes) +
                                             " classes but " +
                                             std::to_string(class_names.size()) + " names");
    }
    const std::size_t total = matrix.total();
    if (total == 0) raise(ErrorKind::EmptyMatrix, "confusion matrix has no observations");

    ClassificationReport report;
    report.class_names = class_names;
    report.matrix = matrix;
    for (int c = 0; c < matrix.classes; ++c) {
        std::size_t tp = matrix.at(c, c);
        std::size_t gold_count = 0, pred_count = 0;
        for (int other = 0; other < matrix.classes; ++other) {
            gold_count += matrix.at(c, other);
            pred_count += matrix.at(other, c);
        }
        ClassMetrics cm;
        cm.name = class_names[c];
        cm.support = gold_count;
        if (pred_count == 0) {
            cm.precision = 0.0;
            report.warnings.push_back("precision for \"" + cm.name +
                                      "\" is undefined (never predicted); reported as 0");
        } else {
            cm.precision = static_cast<double>(tp) / static_cast<double>(pred_count);
        }
        if (gold_count == 0) {
            cm.recall = 0.0;
            report.warnings.push_back("recall for \"" + cm.name +
                                      "\" is undefined (no gold instances); reported as 0");
        } else {
            cm.recall = static_cast<double>(tp) / static_cast<double>(gold_count);
        }
        if (cm.precision + cm.recall == 0.0) {
            cm.f1 = 0.0;
        } else {
            cm.f1 = 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall);
        }
        report.per_class.push_back(std::move(cm));
    }
    report.accuracy = static_cast<double>(matrix.trace()) / static_cast<double>(total);
    for (const ClassMetrics& cm : report.per_class) {
        report.macro_precision += cm.precision;
        report.macro_recall += cm.recall;
        report.macro_f1 += cm.f1;
    }
    const double k = static_cast<double>(matrix.classes);
    report.macro_precision /= k;
    report.macro_recall /= k;
    report.macro_f1 /= k;
    return report;
}

ClassificationReport evaluate(std::span<const int> gold, std::span<const int> predicted,
                              const LabelScheme& scheme) {
    return evaluate_confusion(confusion(gold, predicted, scheme.class_count()),
                              scheme.class_names);
}

std::vector<int> coarsen_map(const LabelScheme& fine, const LabelScheme& coarse) {
    std::vector<int> map(static_cast<std::size_t>(fine.class_count()), -1);
    for (std::size_t level = 0; level < static_cast<std::size_t>(kBloomLevelCount); ++level) {
        int f = fine.level_to_class[level];
        int c = coarse.level_to_class[level];
        if (map[f] == -1) {
            map[f] = c;
        } else if (map[f] != c) {
            raise(ErrorKind::NotACoarsening,
                  "\"" + coarse.name + "\" splits class \"" + fine.class_names[f] +
                      "\" of \"" + fine.name + "\"");
        }
    }
    for (std::size_t f = 0; f < map.size(); ++f) {
        if (map[f] == -1) {
            raise(ErrorKind::NotACoarsening,
                  "fine class \"" + fine.class_names[f] + "\" is not reachable from any level");
        }
    }
    return map;
}

ConfusionMatrix merge_confusion(const ConfusionMatrix& fine_matrix,
                                const LabelScheme& fine, const LabelScheme& coarse) {
    if (fine_matrix.classes != fine.class_count()) {
        raise(ErrorKind::LengthMismatch, "matrix classes do not match the fine scheme");
    }
    std::vector<int> map = coarsen_map(fine, coarse);
    ConfusionMatrix merged;
    merged.classes = coarse.class_count();
    merged.counts.assign(static_cast<std::size_t>(merged.classes) * merged.classes, 0);
    for (int g = 0; g < fine_matrix.classes; ++g) {
        for (int p = 0; p < fine_matrix.classes; ++p) {
            merged.at(map[g], map[p]) += fine_matrix.at(g, p);
        }
    }
    return merged;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        raise(ErrorKind::LengthMismatch, std::to_string(x.size()) + " vs " +
                                             std::to_string(y.size()) + " points");
    }
    if (x.size() < 2) {
        raise(ErrorKind::InsufficientData,
              "need at least two points for a correlation, got " + std::to_string(x.size()));
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

namespace {

LevelStats stats_from_metrics(const std::string& name,
                              const std::vector<std::array<double, 4>>& rows) {
    LevelStats out;
    out.name = name;
    out.count = rows.size();
    if (rows.empty()) return out;
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < 4; ++j) out.mean[j] += row[j];
    }
    for (std::size_t j = 0; j < 4; ++j) out.mean[j] /= static_cast<double>(rows.size());
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double d = row[j] - out.mean[j];
            out.stddev[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < 4; ++j) {
        out.stddev[j] = std::sqrt(out.stddev[j] / static_cast<double>(rows.size()));
    }
    return out;
}

}  // namespace

CorpusStats corpus_stats(std::span<const QuestionRecord> records) {
    if (records.empty()) raise(ErrorKind::EmptyCorpus, "no records to summarize");
    std::array<std::vector<std::array<double, 4>>, kBloomLevelCount> by_level;
    std::vector<std::array<double, 4>> all;
    std::vector<double> ls, fkgls;
    all.reserve(records.size());
    for (const QuestionRecord& rec : records) {
        TextMetrics m = compute_metrics(rec.text);
        std::array<double, 4> row{static_cast<double>(m.length_l), m.fkgl, m.ttr, m.ld};
        by_level[static_cast<std::size_t>(rec.level)].push_back(row);
        all.push_back(row);
        ls.push_back(row[0]);
        fkgls.push_back(row[1]);
    }
    CorpusStats stats;
    for (BloomLevel level : all_bloom_levels()) {
        const auto& rows = by_level[static_cast<std::size_t>(level)];
        if (!rows.empty()) {
            stats.per_level.push_back(stats_from_metrics(to_string(level), rows));
        }
    }
    stats.overall = stats_from_metrics("Overall", all);
    if (ls.size() >= 2) stats.pearson_l_fkgl = pearson(ls, fkgls);
    return stats;
}

}  // namespace bloomclf
