#include "report_json.hpp"

#include "bloomclf/errors.hpp"

namespace bloomclf {

namespace detail {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& detail) {
    raise(ErrorKind::ParseError, "report: " + detail);
}

const ojson& need(const ojson& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing field \"") + key + "\"");
    return *it;
}

}  // namespace

ojson report_json(const ClassificationReport& report) {
    ojson j;
    j["class_names"] = report.class_names;
    j["accuracy"] = report.accuracy;
    j["macro_precision"] = report.macro_precision;
    j["macro_recall"] = report.macro_recall;
    j["macro_f1"] = report.macro_f1;
    ojson per_class = ojson::array();
    for (const ClassMetrics& cm : report.per_class) {
        ojson c;
        c["name"] = cm.name;
        c["support"] = cm.support;
        c["precision"] = cm.precision;
        c["recall"] = cm.recall;
        c["f1"] = cm.f1;
        per_class.push_back(std::move(c));
    }
    j["per_class"] = std::move(per_class);
    ojson confusion = ojson::array();
    for (int g = 0; g < report.matrix.classes; ++g) {
        ojson row = ojson::array();
        for (int p = 0; p < report.matrix.classes; ++p) {
            row.push_back(report.matrix.at(g, p));
        }
        confusion.push_back(std::move(row));
    }
    j["confusion"] = std::move(confusion);
    j["warnings"] = report.warnings;
    return j;
}

ClassificationReport report_from_json(const ojson& j) {
    ClassificationReport report;
    for (const auto& name : need(j, "class_names")) {
        report.class_names.push_back(name.get<std::string>());
    }
    if (report.class_names.empty()) bad("class_names is empty");
    report.accuracy = need(j, "accuracy").get<double>();
    report.macro_precision = need(j, "macro_precision").get<double>();
    report.macro_recall = need(j, "macro_recall").get<double>();
    report.macro_f1 = need(j, "macro_f1").get<double>();
    for (const auto& c : need(j, "per_class")) {
        ClassMetrics cm;
        cm.name = need(c, "name").get<std::string>();
        cm.support = need(c, "support").get<std::size_t>();
        cm.precision = need(c, "precision").get<double>();
        cm.recall = need(c, "recall").get<double>();
        cm.f1 = need(c, "f1").get<double>();
        report.per_class.push_back(std::move(cm));
    }
    if (report.per_class.size() != report.class_names.size()) {
        bad("per_class and class_names disagree");
    }
    const ojson& confusion = need(j, "confusion");
    const int k = static_cast<int>(report.class_names.size());
    if (!confusion.is_array() || static_cast<int>(confusion.size()) != k) {
        bad("confusion must be a " + std::to_string(k) + "x" + std::to_string(k) + " matrix");
    }
    report.matrix.classes = k;
    report.matrix.counts.assign(static_cast<std::size_t>(k) * k, 0);
    for (int g = 0; g < k; ++g) {
        const ojson& row = confusion[static_cast<std::size_t>(g)];
        if (!row.is_array() || static_cast<int>(row.size()) != k) {
            bad("confusion row has the wrong width");
        }
        for (int p = 0; p < k; ++p) {
            report.matrix.at(g, p) = row[static_cast<std::size_t>(p)].get<std::size_t>();
        }
    }
    for (const auto& w : need(j, "warnings")) {
        report.warnings.push_back(w.get<std::string>());
    }
    return report;
}

}  // namespace detail

std::string report_to_json(const ClassificationReport& report) {
    return detail::report_json(report).dump(2) + "\n";
}

ClassificationReport report_from_json(const std::string& text) {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        raise(ErrorKind::ParseError,
              "report: not valid JSON at byte " + std::to_string(e.byte));
    }
    try {
        return detail::report_from_json(j);
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::ParseError, std::string("report: malformed field (") + e.what() + ")");
    }
}

}  // namespace bloomclf
