#include "bloomclf/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bloomclf/errors.hpp"
#include "bloomclf/rng.hpp"

namespace bloomclf {

namespace {

const std::array<const char*, kBloomLevelCount> kLevelNames = {
    "Knowledge", "Comprehension", "Application", "Analysis", "Synthesis", "Evaluation"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

BloomLevel level_or_throw(std::string_view raw, std::size_t row) {
    auto level = parse_bloom_level(trim(raw));
    if (!level) {
        raise(ErrorKind::UnknownLabel,
              "row " + std::to_string(row) + ": \"" + std::string(raw) +
                  "\" is not one of the six Bloom level names");
    }
    return *level;
}

QuestionRecord make_record(std::string text, std::string_view label, std::size_t row) {
    if (trim(text).empty()) {
        raise(ErrorKind::ParseError, "row " + std::to_string(row) + ": empty question text");
    }
    return QuestionRecord{std::move(text), level_or_throw(label, row)};
}

// RFC-4180 field splitter for one file. Returns rows of fields; rows is the
// 1-based physical line a record starts on (for error messages).
std::vector<std::pair<std::size_t, std::vector<std::string>>> parse_csv(const std::string& data) {
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t record_line = 1;

    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        rows.emplace_back(record_line, std::move(fields));
        fields.clear();
        record_line = line;
    };

    for (std::size_t i = 0; i < data.size(); ++i) {
        char c = data[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < data.size() && data[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
        } else if (c == '"') {
            if (field_started && !field.empty()) {
                raise(ErrorKind::ParseError,
                      "row " + std::to_string(line) + ": quote inside unquoted field");
            }
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < data.size() && data[i + 1] == '\n') {
            end_record();
            ++i;
            ++line;
            record_line = line;
        } else if (c == '\n') {
            end_record();
            ++line;
            record_line = line;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted) raise(ErrorKind::ParseError, "row " + std::to_string(record_line) + ": unterminated quote");
    if (field_started || !fields.empty()) end_record();

    // Drop records that are entirely empty (trailing newline artifacts).
    std::erase_if(rows, [](const auto& row) {
        return row.second.size() == 1 && row.second[0].empty();
    });
    return rows;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string data = buffer.str();
    // Strip a UTF-8 BOM if present.
    if (data.size() >= 3 && data.compare(0, 3, "\xEF\xBB\xBF") == 0) data.erase(0, 3);
    return data;
}

std::vector<QuestionRecord> load_csv(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    auto rows = parse_csv(data);
    if (rows.empty()) raise(ErrorKind::EmptyCorpus, path.string() + " has no rows");

    const auto& header = rows.front().second;
    if (header.size() != 2 || lower(trim(header[0])) != "text" || lower(trim(header[1])) != "label") {
        raise(ErrorKind::ParseError, "row 1: expected header \"text,label\"");
    }

    std::vector<QuestionRecord> corpus;
    corpus.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& [line, fields] = rows[i];
        if (fields.size() != 2) {
            raise(ErrorKind::ParseError, "row " + std::to_string(line) + ": expected 2 fields, got " +
                                             std::to_string(fields.size()));
        }
        corpus.push_back(make_record(fields[0], fields[1], line));
    }
    if (corpus.empty()) raise(ErrorKind::EmptyCorpus, path.string() + " has a header but no records");
    return corpus;
}

std::vector<QuestionRecord> load_jsonl(const std::filesystem::path& path) {
    const std::string data = read_file(path);
    std::istringstream in(data);
    std::string line;
    std::size_t line_no = 0;
    std::vector<QuestionRecord> corpus;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        nlohmann::json object;
        try {
            object = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            raise(ErrorKind::ParseError, "row " + std::to_string(line_no) + ": " + e.what());
        }
        if (!object.is_object() || !object.contains("text") || !object.contains("label") ||
            !object["text"].is_string() || !object["label"].is_string()) {
            raise(ErrorKind::ParseError, "row " + std::to_string(line_no) +
                                             ": expected {\"text\": string, \"label\": string}");
        }
        corpus.push_back(make_record(object["text"].get<std::string>(),
                                     object["label"].get<std::string>(), line_no));
    }
    if (corpus.empty()) raise(ErrorKind::EmptyCorpus, path.string() + " has no records");
    return corpus;
}

bool needs_quoting(const std::string& field) {
    if (field.empty()) return false;
    if (field.front() == ' ' || field.back() == ' ') return true;
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_field(const std::string& field) {
    if (!needs_quoting(field)) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

const char* to_string(BloomLevel level) {
    return kLevelNames[static_cast<int>(level)];
}

std::optional<BloomLevel> parse_bloom_level(std::string_view name) {
    const std::string needle = lower(name);
    for (int i = 0; i < kBloomLevelCount; ++i) {
        if (needle == lower(kLevelNames[i])) return static_cast<BloomLevel>(i);
    }
    return std::nullopt;
}

LabelScheme LabelScheme::full6() {
    LabelScheme scheme;
    scheme.name = "Full6";
    scheme.level_to_class = {0, 1, 2, 3, 4, 5};
    scheme.class_names.assign(kLevelNames.begin(), kLevelNames.end());
    return scheme;
}

LabelScheme LabelScheme::merged4() {
    LabelScheme scheme;
    scheme.name = "Merged4";
    scheme.level_to_class = {0, 1, 2, 3, 3, 3};
    scheme.class_names = {"Knowledge", "Comprehension", "Application", "Higher-Order"};
    return scheme;
}

LabelScheme LabelScheme::merged3() {
    LabelScheme scheme;
    scheme.name = "Merged3";
    scheme.level_to_class = {0, 1, 1, 2, 2, 2};
    scheme.class_names = {"Knowledge", "Mid-Order", "Higher-Order"};
    return scheme;
}

std::optional<LabelScheme> LabelScheme::by_name(std::string_view name) {
    const std::string needle = lower(name);
    if (needle == "full6") return full6();
    if (needle == "merged4") return merged4();
    if (needle == "merged3") return merged3();
    return std::nullopt;
}

int apply_scheme(BloomLevel level, const LabelScheme& scheme) {
    return scheme.level_to_class[static_cast<int>(level)];
}

std::vector<QuestionRecord> load_corpus(const std::filesystem::path& path, CorpusFormat format) {
    return format == CorpusFormat::Csv ? load_csv(path) : load_jsonl(path);
}

std::vector<QuestionRecord> load_corpus(const std::filesystem::path& path) {
    const std::string ext = lower(path.extension().string());
    if (ext == ".csv") return load_corpus(path, CorpusFormat::Csv);
    if (ext == ".jsonl" || ext == ".ndjson") return load_corpus(path, CorpusFormat::Jsonl);
    raise(ErrorKind::IoError, path.string() + ": unknown corpus extension (use .csv or .jsonl)");
}

void write_corpus_csv(const std::filesystem::path& path, const std::vector<QuestionRecord>& corpus) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::IoError, "cannot write " + path.string());
    out << "text,label\n";
    for (const auto& record : corpus) {
        out << csv_field(record.text) << ',' << to_string(record.level) << '\n';
    }
    if (!out) raise(ErrorKind::IoError, "short write to " + path.string());
}

std::array<std::size_t, kBloomLevelCount> class_distribution(const std::vector<QuestionRecord>& corpus) {
    if (corpus.empty()) raise(ErrorKind::EmptyCorpus, "class_distribution over empty corpus");
    std::array<std::size_t, kBloomLevelCount> counts{};
    for (const auto& record : corpus) ++counts[static_cast<int>(record.level)];
    return counts;
}

std::vector<QuestionRecord> balance(const std::vector<QuestionRecord>& corpus, std::uint64_t seed) {
    if (corpus.empty()) raise(ErrorKind::EmptyCorpus, "balance over empty corpus");

    std::array<std::vector<std::size_t>, kBloomLevelCount> by_level;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        by_level[static_cast<int>(corpus[i].level)].push_back(i);
    }

    std::size_t min_count = corpus.size();
    for (const auto& indices : by_level) {
        if (!indices.empty()) min_count = std::min(min_count, indices.size());
    }

    Rng rng(seed);
    std::vector<std::size_t> kept;
    for (auto& indices : by_level) {
        if (indices.empty()) continue;
        shuffle_in_place(indices, rng);
        kept.insert(kept.end(), indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(min_count));
    }
    std::sort(kept.begin(), kept.end());

    std::vector<QuestionRecord> result;
    result.reserve(kept.size());
    for (std::size_t index : kept) result.push_back(corpus[index]);
    return result;
}

SplitDataset stratified_split(const std::vector<QuestionRecord>& corpus, double fraction,
                              std::uint64_t seed) {
    if (corpus.empty()) raise(ErrorKind::EmptyCorpus, "stratified_split over empty corpus");
    if (!(fraction > 0.0 && fraction < 1.0)) {
        raise(ErrorKind::InvalidArgument, "split fraction must lie in (0,1)");
    }

    std::array<std::vector<std::size_t>, kBloomLevelCount> by_level;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        by_level[static_cast<int>(corpus[i].level)].push_back(i);
    }

    Rng rng(seed);
    std::vector<std::size_t> validation_indices;
    std::vector<std::size_t> train_indices;
    for (int level = 0; level < kBloomLevelCount; ++level) {
        auto& indices = by_level[level];
        if (indices.empty()) continue;
        if (indices.size() < 2) {
            raise(ErrorKind::ClassTooSmall,
                  std::string(kLevelNames[level]) + " has " + std::to_string(indices.size()) +
                      " record(s); need at least 2 to split");
        }
        shuffle_in_place(indices, rng);
        auto take = static_cast<std::size_t>(fraction * static_cast<double>(indices.size()));
        if (take < 1) take = 1;
        validation_indices.insert(validation_indices.end(), indices.begin(),
                                  indices.begin() + static_cast<std::ptrdiff_t>(take));
        train_indices.insert(train_indices.end(), indices.begin() + static_cast<std::ptrdiff_t>(take),
                             indices.end());
    }
    std::sort(validation_indices.begin(), validation_indices.end());
    std::sort(train_indices.begin(), train_indices.end());

    SplitDataset split;
    split.seed = seed;
    split.fraction = fraction;
    split.train.reserve(train_indices.size());
    split.validation.reserve(validation_indices.size());
    for (std::size_t index : train_indices) split.train.push_back(corpus[index]);
    for (std::size_t index : validation_indices) split.validation.push_back(corpus[index]);
    return split;
}

} // namespace bloomclf
