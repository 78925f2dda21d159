#include "bloomclf/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bloomclf/errors.hpp"
#include "bloomclf/rng.hpp"
#include "bloomclf/textmetrics.hpp"
#include "bloomclf/version.hpp"
#include "report_json.hpp"

namespace bloomclf {

using ojson = nlohmann::ordered_json;

const char* to_string(OutputFormat format) {
    switch (format) {
        case OutputFormat::Json: return "json";
        case OutputFormat::Markdown: return "markdown";
        case OutputFormat::Both: return "both";
    }
    return "unknown";
}

std::optional<OutputFormat> parse_output_format(std::string_view name) {
    if (name == "json") return OutputFormat::Json;
    if (name == "markdown") return OutputFormat::Markdown;
    if (name == "both") return OutputFormat::Both;
    return std::nullopt;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"exp1", "exp2", "exp3", "exp4", "exp5"};
    return names;
}

ExperimentOptions experiment_preset(const std::string& name) {
    ExperimentOptions opt;
    opt.name = name;
    if (name == "exp1") {
        opt.model = ModelKind::LogReg;
        opt.features.mode = FeatureMode::Metrics;
        opt.scheme = "full6";
        opt.balance = true;
    } else if (name == "exp2") {
        opt.model = ModelKind::LogReg;
        opt.features.mode = FeatureMode::Metrics;
        opt.scheme = "merged4";
        opt.balance = true;
    } else if (name == "exp3") {
        opt.model = ModelKind::LogReg;
        opt.features.mode = FeatureMode::Metrics;
        opt.scheme = "merged3";
        opt.balance = true;
    } else if (name == "exp4") {
        opt.model = ModelKind::NaiveBayes;
        opt.features.mode = FeatureMode::Counts;
        opt.features.metric_scaling = MetricScaling::None;
        opt.scheme = "full6";
        opt.balance = false;
    } else if (name == "exp5") {
        opt.model = ModelKind::LinearSvc;
        opt.features.mode = FeatureMode::Tfidf;
        opt.features.metric_scaling = MetricScaling::None;
        opt.scheme = "full6";
        opt.balance = false;
    } else {
        raise(ErrorKind::InvalidArgument,
              "unknown experiment preset \"" + name + "\" (expected exp1..exp5)");
    }
    return opt;
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        raise(e.kind(), std::string("stage ") + name + ": " + e.message());
    }
}

LabelScheme resolve_scheme(const std::string& name) {
    auto scheme = LabelScheme::by_name(name);
    if (!scheme) {
        raise(ErrorKind::InvalidArgument,
              "unknown scheme \"" + name + "\" (expected full6, merged4 or merged3)");
    }
    return *scheme;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentOptions& options,
                                std::vector<QuestionRecord> corpus) {
    ExperimentResult result;
    result.options = options;
    result.scheme = resolve_scheme(options.scheme);
    result.corpus_size = corpus.size();
    if (corpus.empty()) raise(ErrorKind::EmptyCorpus, "corpus has no records");

    if (options.balance) {
        corpus = stage("balance", [&] { return balance(corpus, options.seed); });
    }
    result.balanced_size = corpus.size();

    SplitDataset split = stage("split", [&] {
        return stratified_split(corpus, options.split_fraction, options.seed);
    });
    result.train_size = split.train.size();
    result.validation_size = split.validation.size();

    struct Prepared {
        FittedFeatures fitted;
        FeatureMatrix train_x;
        FeatureMatrix validation_x;
    };
    Prepared prepared = stage("features", [&] {
        std::vector<TokenizedText> train_docs, validation_docs;
        train_docs.reserve(split.train.size());
        for (const QuestionRecord& rec : split.train) train_docs.push_back(tokenize(rec.text));
        validation_docs.reserve(split.validation.size());
        for (const QuestionRecord& rec : split.validation) {
            validation_docs.push_back(tokenize(rec.text));
        }
        Prepared p;
        p.fitted = fit_features(train_docs, options.features);
        p.train_x = transform_all(train_docs, p.fitted);
        p.validation_x = transform_all(validation_docs, p.fitted);
        return p;
    });

    std::vector<int> train_y, validation_y;
    for (const QuestionRecord& rec : split.train) {
        train_y.push_back(apply_scheme(rec.level, result.scheme));
    }
    for (const QuestionRecord& rec : split.validation) {
        validation_y.push_back(apply_scheme(rec.level, result.scheme));
    }

    result.model = stage("train", [&] {
        TrainedModel model;
        model.kind = options.model;
        model.scheme = result.scheme;
        model.features = prepared.fitted;
        const int k = result.scheme.class_count();
        switch (options.model) {
            case ModelKind::LogReg: {
                LogRegHyperparams hp = options.logreg;
                hp.seed = options.seed;
                model.params = train_logreg(prepared.train_x, train_y, k, hp);
                break;
            }
            case ModelKind::NaiveBayes:
                model.params =
                    train_naive_bayes(prepared.train_x, train_y, k, options.naive_bayes);
                break;
            case ModelKind::LinearSvc: {
                SvcHyperparams hp = options.svc;
                hp.seed = options.seed;
                model.params = train_linear_svc(prepared.train_x, train_y, k, hp);
                break;
            }
        }
        return model;
    });

    result.report = stage("evaluate", [&] {
        std::vector<int> predicted = predict(result.model, prepared.validation_x);
        return evaluate(validation_y, predicted, result.scheme);
    });
    return result;
}

ExperimentResult run_experiment(const ExperimentOptions& options) {
    std::vector<QuestionRecord> corpus =
        stage("load", [&] { return load_corpus(options.corpus_path); });
    return run_experiment(options, std::move(corpus));
}

namespace {

ojson hyperparams_json(const ExperimentOptions& options) {
    ojson h;
    ojson lr;
    lr["l2_lambda"] = options.logreg.l2_lambda;
    lr["learning_rate"] = options.logreg.learning_rate;
    lr["max_iters"] = options.logreg.max_iters;
    lr["tol"] = options.logreg.tol;
    h["logreg"] = std::move(lr);
    ojson nb;
    nb["alpha"] = options.naive_bayes.alpha;
    h["naive_bayes"] = std::move(nb);
    ojson svc;
    svc["l2_lambda"] = options.svc.l2_lambda;
    svc["epochs"] = options.svc.epochs;
    h["linear_svc"] = std::move(svc);
    return h;
}

ojson features_config_json(const FeatureConfig& config) {
    ojson f;
    f["mode"] = to_string(config.mode);
    f["sublinear_tf"] = config.sublinear_tf;
    f["min_df"] = config.min_df;
    f["metric_scaling"] = to_string(config.metric_scaling);
    return f;
}

std::string fixed2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::IoError, "cannot open " + path + " for writing");
    out << content;
    if (!out) raise(ErrorKind::IoError, "failed writing " + path);
}

}  // namespace

std::string manifest_to_json(const ExperimentOptions& options) {
    ojson j;
    j["format_version"] = kModelFormatVersion;
    j["tool_version"] = kVersion;
    j["rng_algorithm"] = rng_algorithm();
    j["experiment"] = options.name;
    j["corpus_path"] = options.corpus_path;
    j["scheme"] = options.scheme;
    j["model"] = to_string(options.model);
    j["features"] = features_config_json(options.features);
    j["balance"] = options.balance;
    j["seed"] = options.seed;
    j["split_fraction"] = options.split_fraction;
    j["output_format"] = to_string(options.format);
    j["hyperparams"] = hyperparams_json(options);
    return j.dump(2) + "\n";
}

namespace {

const ojson& need(const ojson& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) {
        raise(ErrorKind::ParseError, std::string("manifest: missing field \"") + key + "\"");
    }
    return *it;
}

}  // namespace

ExperimentOptions options_from_manifest_json(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        raise(ErrorKind::ParseError,
              "manifest: not valid JSON at byte " + std::to_string(e.byte));
    }
    try {
        int version = need(j, "format_version").get<int>();
        if (version != kModelFormatVersion) {
            raise(ErrorKind::VersionMismatch,
                  "manifest format_version " + std::to_string(version) +
                      " is not supported by this build");
        }
        ExperimentOptions opt;
        opt.name = need(j, "experiment").get<std::string>();
        opt.corpus_path = need(j, "corpus_path").get<std::string>();
        opt.scheme = need(j, "scheme").get<std::string>();
        opt.model = parse_model_kind(need(j, "model").get<std::string>());
        const ojson& f = need(j, "features");
        auto mode = parse_feature_mode(need(f, "mode").get<std::string>());
        if (!mode) raise(ErrorKind::ParseError, "manifest: unknown feature mode");
        opt.features.mode = *mode;
        opt.features.sublinear_tf = need(f, "sublinear_tf").get<bool>();
        opt.features.min_df = need(f, "min_df").get<int>();
        auto scaling = parse_metric_scaling(need(f, "metric_scaling").get<std::string>());
        if (!scaling) raise(ErrorKind::ParseError, "manifest: unknown metric scaling");
        opt.features.metric_scaling = *scaling;
        opt.balance = need(j, "balance").get<bool>();
        opt.seed = need(j, "seed").get<std::uint64_t>();
        opt.split_fraction = need(j, "split_fraction").get<double>();
        auto format = parse_output_format(need(j, "output_format").get<std::string>());
        if (!format) raise(ErrorKind::ParseError, "manifest: unknown output format");
        opt.format = *format;
        const ojson& h = need(j, "hyperparams");
        const ojson& lr = need(h, "logreg");
        opt.logreg.l2_lambda = need(lr, "l2_lambda").get<double>();
        opt.logreg.learning_rate = need(lr, "learning_rate").get<double>();
        opt.logreg.max_iters = need(lr, "max_iters").get<int>();
        opt.logreg.tol = need(lr, "tol").get<double>();
        opt.naive_bayes.alpha = need(need(h, "naive_bayes"), "alpha").get<double>();
        const ojson& svc = need(h, "linear_svc");
        opt.svc.l2_lambda = need(svc, "l2_lambda").get<double>();
        opt.svc.epochs = need(svc, "epochs").get<int>();
        return opt;
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorKind::ParseError, std::string("manifest: malformed field (") + e.what() + ")");
    }
}

ExperimentOptions load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return options_from_manifest_json(buffer.str());
}

std::string report_json_document(const ExperimentResult& result) {
    ojson j;
    j["format_version"] = kModelFormatVersion;
    j["tool_version"] = kVersion;
    j["experiment"] = result.options.name;
    j["model"] = to_string(result.options.model);
    j["scheme"] = result.options.scheme;
    j["features"] = features_config_json(result.options.features);
    j["balance"] = result.options.balance;
    j["seed"] = result.options.seed;
    j["split_fraction"] = result.options.split_fraction;
    ojson corpus;
    corpus["path"] = result.options.corpus_path;
    corpus["loaded"] = result.corpus_size;
    corpus["after_balance"] = result.balanced_size;
    corpus["train"] = result.train_size;
    corpus["validation"] = result.validation_size;
    j["corpus"] = std::move(corpus);
    j["hyperparams"] = hyperparams_json(result.options);
    if (const auto* lr = std::get_if<LogRegModel>(&result.model.params)) {
        ojson t;
        t["iterations_run"] = lr->iterations_run;
        t["final_loss"] = lr->final_loss;
        j["training"] = std::move(t);
    }
    j["metrics"] = detail::report_json(result.report);
    return j.dump(2) + "\n";
}

std::string report_markdown_document(const ExperimentResult& result) {
    std::string out;
    out += "# Experiment report: " + result.options.name + "\n\n";
    out += "- Corpus: " +
           (result.options.corpus_path.empty() ? std::string("(in-memory)")
                                               : result.options.corpus_path) +
           " (" + std::to_string(result.corpus_size) + " questions";
    if (result.options.balance) {
        out += ", " + std::to_string(result.balanced_size) + " after balancing";
    }
    out += ")\n";
    out += "- Model: " + std::string(to_string(result.options.model)) + "; features: " +
           to_string(result.options.features.mode) + "\n";
    out += "- Scheme: " + result.options.scheme + " (" +
           std::to_string(result.scheme.class_count()) + " classes)\n";
    out += "- Seed: " + std::to_string(result.options.seed) + "; split fraction: " +
           fixed2(result.options.split_fraction) + " (train " +
           std::to_string(result.train_size) + ", validation " +
           std::to_string(result.validation_size) + ")\n\n";
    out += "## Results\n\n";
    out += classification_table_markdown(result.report);
    out += "\n## Confusion matrix\n\n";
    out += confusion_markdown(result.report);
    if (!result.report.warnings.empty()) {
        out += "\n## Warnings\n\n";
        for (const std::string& w : result.report.warnings) out += "- " + w + "\n";
    }
    return out;
}

ArtifactPaths write_artifacts(const ExperimentResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) raise(ErrorKind::IoError, "cannot create directory " + out_dir);

    ArtifactPaths paths;
    const OutputFormat format = result.options.format;
    return stage("emit", [&] {
        if (format == OutputFormat::Json || format == OutputFormat::Both) {
            paths.report_json = (fs::path(out_dir) / "report.json").string();
            write_text_file(paths.report_json, report_json_document(result));
        }
        if (format == OutputFormat::Markdown || format == OutputFormat::Both) {
            paths.report_md = (fs::path(out_dir) / "report.md").string();
            write_text_file(paths.report_md, report_markdown_document(result));
        }
        paths.model_json = (fs::path(out_dir) / "model.json").string();
        save_model(result.model, paths.model_json);
        paths.manifest_json = (fs::path(out_dir) / "manifest.json").string();
        write_text_file(paths.manifest_json, manifest_to_json(result.options));
        return paths;
    });
}

}  // namespace bloomclf
