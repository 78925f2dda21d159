#include <cstdio>
#include <string>

#include "bloomclf/eval.hpp"

namespace bloomclf {

namespace {

std::string fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

}  // namespace

std::string classification_table_markdown(const ClassificationReport& report) {
    std::string out;
    out += "| Level | Precision | Recall | F1-score |\n";
    out += "| --- | --- | --- | --- |\n";
    // Descending cognitive order, i.e. highest class index first.
    for (int c = static_cast<int>(report.per_class.size()) - 1; c >= 0; --c) {
        const ClassMetrics& cm = report.per_class[static_cast<std::size_t>(c)];
        out += "| " + cm.name + " | " + fixed2(cm.precision) + " | " + fixed2(cm.recall) +
               " | " + fixed2(cm.f1) + " |\n";
    }
    out += "| Accuracy |  |  | " + fixed2(report.accuracy) + " |\n";
    return out;
}

std::string confusion_markdown(const ClassificationReport& report) {
    const ConfusionMatrix& m = report.matrix;
    std::string out = "| Gold \\ Predicted |";
    for (const std::string& name : report.class_names) out += " " + name + " |";
    out += "\n|";
    for (std::size_t c = 0; c <= report.class_names.size(); ++c) out += " --- |";
    out += "\n";
    for (int g = 0; g < m.classes; ++g) {
        out += "| " + report.class_names[static_cast<std::size_t>(g)] + " |";
        for (int p = 0; p < m.classes; ++p) {
            out += " " + std::to_string(m.at(g, p)) + " |";
        }
        out += "\n";
    }
    return out;
}

std::string comparative_markdown(std::span<const ComparativeRow> rows) {
    std::string out;
    out += "| Experiment | Method | Accuracy | Notes |\n";
    out += "| --- | --- | --- | --- |\n";
    for (const ComparativeRow& row : rows) {
        out += "| " + row.experiment + " | " + row.method + " | " + fixed2(row.accuracy) +
               " | " + row.notes + " |\n";
    }
    return out;
}

std::string corpus_stats_markdown(const CorpusStats& stats) {
    std::string out;
    out += "| Level | Count | Mean L | Mean FKGL | Mean TTR | Mean LD |\n";
    out += "| --- | --- | --- | --- | --- | --- |\n";
    auto row = [&](const LevelStats& s) {
        out += "| " + s.name + " | " + std::to_string(s.count) + " | " + fixed2(s.mean[0]) +
               " | " + fixed2(s.mean[1]) + " | " + fixed2(s.mean[2]) + " | " +
               fixed2(s.mean[3]) + " |\n";
    };
    for (const LevelStats& s : stats.per_level) row(s);
    row(stats.overall);
    if (stats.pearson_l_fkgl) {
        out += "\nPearson r (L vs FKGL): " + fixed2(*stats.pearson_l_fkgl) + "\n";
    } else {
        out += "\nPearson r (L vs FKGL): undefined (zero variance)\n";
    }
    return out;
}

}  // namespace bloomclf
