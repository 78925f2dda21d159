#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bloomclf/datagen.hpp"
#include "bloomclf/dataset.hpp"
#include "bloomclf/errors.hpp"
#include "bloomclf/eval.hpp"
#include "bloomclf/models.hpp"
#include "bloomclf/pipeline.hpp"
#include "bloomclf/textmetrics.hpp"
#include "bloomclf/version.hpp"

namespace {

using bloomclf::Error;
using bloomclf::ErrorKind;
using ojson = nlohmann::ordered_json;

// Shortest decimal form that round-trips the exact double.
std::string dstr(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

void print_error_line(const std::string& kind, const std::string& message) {
    ojson j;
    j["error"]["kind"] = kind;
    j["error"]["message"] = message;
    std::cerr << j.dump() << "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) bloomclf::raise(ErrorKind::IoError, "cannot open " + path + " for writing");
    out << content;
    if (!out) bloomclf::raise(ErrorKind::IoError, "failed writing " + path);
}

struct AnalyzeArgs {
    std::string corpus;
    std::string out_dir;
    std::string format = "both";
};

void run_analyze(const AnalyzeArgs& args) {
    namespace fs = std::filesystem;
    auto format = bloomclf::parse_output_format(args.format);
    if (!format) {
        bloomclf::raise(ErrorKind::InvalidArgument,
                        "unknown format \"" + args.format + "\" (json, markdown or both)");
    }
    std::vector<bloomclf::QuestionRecord> corpus = bloomclf::load_corpus(args.corpus);

    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec) bloomclf::raise(ErrorKind::IoError, "cannot create directory " + args.out_dir);

    std::string csv = "id,label,length_l,fkgl,ttr,ld\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        bloomclf::TextMetrics m = bloomclf::compute_metrics(corpus[i].text);
        csv += std::to_string(i);
        csv += ',';
        csv += bloomclf::to_string(corpus[i].level);
        csv += ',';
        csv += std::to_string(m.length_l);
        csv += ',';
        csv += dstr(m.fkgl) + ',' + dstr(m.ttr) + ',' + dstr(m.ld) + '\n';
    }
    const std::string csv_path = (fs::path(args.out_dir) / "metrics.csv").string();
    write_text_file(csv_path, csv);
    std::cout << "wrote " << csv_path << "\n";

    bloomclf::CorpusStats stats = bloomclf::corpus_stats(corpus);
    if (*format == bloomclf::OutputFormat::Json || *format == bloomclf::OutputFormat::Both) {
        ojson j;
        j["tool_version"] = bloomclf::kVersion;
        j["corpus_path"] = args.corpus;
        j["questions"] = corpus.size();
        auto level_json = [](const bloomclf::LevelStats& s) {
            ojson l;
            l["name"] = s.name;
            l["count"] = s.count;
            l["mean"] = {{"length_l", s.mean[0]},
                         {"fkgl", s.mean[1]},
                         {"ttr", s.mean[2]},
                         {"ld", s.mean[3]}};
            l["stddev"] = {{"length_l", s.stddev[0]},
                           {"fkgl", s.stddev[1]},
                           {"ttr", s.stddev[2]},
                           {"ld", s.stddev[3]}};
            return l;
        };
        ojson levels = ojson::array();
        for (const auto& s : stats.per_level) levels.push_back(level_json(s));
        j["levels"] = std::move(levels);
        j["overall"] = level_json(stats.overall);
        if (stats.pearson_l_fkgl) {
            j["pearson_l_fkgl"] = *stats.pearson_l_fkgl;
        } else {
            j["pearson_l_fkgl"] = nullptr;
        }
        const std::string path = (fs::path(args.out_dir) / "summary.json").string();
        write_text_file(path, j.dump(2) + "\n");
        std::cout << "wrote " << path << "\n";
    }
    if (*format == bloomclf::OutputFormat::Markdown || *format == bloomclf::OutputFormat::Both) {
        const std::string path = (fs::path(args.out_dir) / "summary.md").string();
        write_text_file(path, bloomclf::corpus_stats_markdown(stats));
        std::cout << "wrote " << path << "\n";
    }
    std::cout << "\n" << bloomclf::corpus_stats_markdown(stats);
}

struct ExperimentArgs {
    std::string name;
    std::string corpus;
    std::string out_dir;
    std::uint64_t seed = 0;
    double split_fraction = 0.2;
    std::string scheme;
    std::string features;
    std::string model;
    std::string format;
    bool balance_on = false;
    bool balance_off = false;
    double l2_lambda = 0.0;
    double learning_rate = 0.0;
    int max_iters = 0;
    double tol = -1.0;
    double alpha = 0.0;
    int epochs = 0;
    // which flags were actually given
    bool has_seed = false, has_split = false, has_scheme = false, has_features = false;
    bool has_model = false, has_format = false, has_l2 = false, has_lr = false;
    bool has_max_iters = false, has_tol = false, has_alpha = false, has_epochs = false;
};

bloomclf::ExperimentOptions build_options(const ExperimentArgs& args) {
    bloomclf::ExperimentOptions opt;
    if (args.name == "custom") {
        opt.name = "custom";
    } else {
        opt = bloomclf::experiment_preset(args.name);
    }
    opt.corpus_path = args.corpus;
    if (args.has_seed) opt.seed = args.seed;
    if (args.has_split) opt.split_fraction = args.split_fraction;
    if (args.has_scheme) opt.scheme = args.scheme;
    if (args.has_model) opt.model = bloomclf::parse_model_kind(args.model);
    if (args.has_features) {
        auto mode = bloomclf::parse_feature_mode(args.features);
        if (!mode) {
            bloomclf::raise(ErrorKind::InvalidArgument,
                            "unknown feature mode \"" + args.features + "\"");
        }
        opt.features.mode = *mode;
        if (*mode == bloomclf::FeatureMode::Tfidf || *mode == bloomclf::FeatureMode::Counts) {
            opt.features.metric_scaling = bloomclf::MetricScaling::None;
        }
    }
    if (args.has_format) {
        auto format = bloomclf::parse_output_format(args.format);
        if (!format) {
            bloomclf::raise(ErrorKind::InvalidArgument,
                            "unknown format \"" + args.format + "\" (json, markdown or both)");
        }
        opt.format = *format;
    }
    if (args.balance_on && args.balance_off) {
        bloomclf::raise(ErrorKind::InvalidArgument, "--balance conflicts with --no-balance");
    }
    if (args.balance_on) opt.balance = true;
    if (args.balance_off) opt.balance = false;

    if (args.has_l2) {
        switch (opt.model) {
            case bloomclf::ModelKind::LogReg: opt.logreg.l2_lambda = args.l2_lambda; break;
            case bloomclf::ModelKind::LinearSvc: opt.svc.l2_lambda = args.l2_lambda; break;
            case bloomclf::ModelKind::NaiveBayes:
                bloomclf::raise(ErrorKind::InvalidArgument,
                                "--l2-lambda does not apply to naive_bayes");
        }
    }
    if (args.has_lr) opt.logreg.learning_rate = args.learning_rate;
    if (args.has_max_iters) opt.logreg.max_iters = args.max_iters;
    if (args.has_tol) opt.logreg.tol = args.tol;
    if (args.has_alpha) opt.naive_bayes.alpha = args.alpha;
    if (args.has_epochs) opt.svc.epochs = args.epochs;
    return opt;
}

void report_run(const bloomclf::ExperimentResult& result, const bloomclf::ArtifactPaths& paths) {
    char acc[32];
    std::snprintf(acc, sizeof(acc), "%.4f", result.report.accuracy);
    std::cout << result.options.name << ": accuracy " << acc << " (validation "
              << result.validation_size << " of " << result.balanced_size << ")\n";
    for (const std::string& p :
         {paths.report_json, paths.report_md, paths.model_json, paths.manifest_json}) {
        if (!p.empty()) std::cout << "wrote " << p << "\n";
    }
}

void run_experiment_cmd(const ExperimentArgs& args) {
    bloomclf::ExperimentOptions opt = build_options(args);
    bloomclf::ExperimentResult result = bloomclf::run_experiment(opt);
    bloomclf::ArtifactPaths paths = bloomclf::write_artifacts(result, args.out_dir);
    report_run(result, paths);
}

struct PredictArgs {
    std::string model;
    std::string corpus;
    std::string text;
    bool has_text = false;
    bool proba = false;
};

void run_predict(const PredictArgs& args) {
    bloomclf::TrainedModel model = bloomclf::load_model(args.model);
    if (args.proba && std::holds_alternative<bloomclf::LinearSvcModel>(model.params)) {
        bloomclf::raise(ErrorKind::InvalidArgument,
                        "--proba is not available for linear_svc (margins are uncalibrated)");
    }
    auto emit = [&](const std::string& text) {
        bloomclf::TokenizedText doc = bloomclf::tokenize(text);
        bloomclf::SparseVector x = bloomclf::featurize(doc, model.features);
        int predicted = bloomclf::predict(model, x);
        std::cout << model.scheme.class_names[static_cast<std::size_t>(predicted)];
        if (args.proba) {
            auto proba = bloomclf::predict_proba(model, x);
            std::cout << '\t';
            for (std::size_t c = 0; c < proba->size(); ++c) {
                if (c) std::cout << ' ';
                std::cout << dstr((*proba)[c]);
            }
        }
        std::cout << "\n";
    };

    if (args.has_text) {
        emit(args.text);
        return;
    }
    if (args.corpus.empty()) {
        bloomclf::raise(ErrorKind::InvalidArgument, "provide --text or --corpus");
    }
    std::vector<bloomclf::QuestionRecord> corpus = bloomclf::load_corpus(args.corpus);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        try {
            emit(corpus[i].text);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptyText) throw;
            ++failures;
            std::cerr << "warning: row " << i + 1 << " skipped: " << e.message() << "\n";
        }
    }
    if (failures == corpus.size()) {
        bloomclf::raise(ErrorKind::EmptyText,
                        "all " + std::to_string(failures) + " inputs were skipped");
    }
}

struct DatagenArgs {
    int n_per_level = 0;
    std::uint64_t seed = 0;
    std::string banks;
    std::string out;
};

void run_datagen(const DatagenArgs& args) {
    bloomclf::Banks banks =
        args.banks.empty() ? bloomclf::default_banks() : bloomclf::load_banks(args.banks);
    bloomclf::GenerationResult generated =
        bloomclf::generate(args.n_per_level, args.seed, banks);
    bloomclf::write_corpus_csv(args.out, generated.records);
    if (generated.space_exhausted) {
        std::cerr << "warning: bank space exhausted; duplicate questions were emitted\n";
    }
    auto distribution = bloomclf::class_distribution(generated.records);
    std::cout << "wrote " << args.out << " (" << generated.records.size() << " questions)\n";
    for (bloomclf::BloomLevel level : bloomclf::all_bloom_levels()) {
        std::cout << bloomclf::to_string(level) << ": "
                  << distribution[static_cast<std::size_t>(level)] << "\n";
    }
}

struct CompareArgs {
    std::vector<std::string> reports;
    std::string out;
};

void run_compare(const CompareArgs& args) {
    std::vector<bloomclf::ComparativeRow> rows;
    for (const std::string& path : args.reports) {
        std::ifstream in(path, std::ios::binary);
        if (!in) bloomclf::raise(ErrorKind::IoError, "cannot open " + path);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        ojson j;
        try {
            j = ojson::parse(buffer.str());
        } catch (const nlohmann::json::parse_error& e) {
            bloomclf::raise(ErrorKind::ParseError,
                            path + ": not valid JSON at byte " + std::to_string(e.byte));
        }
        try {
            bloomclf::ComparativeRow row;
            row.experiment = j.at("experiment").get<std::string>();
            row.method = j.at("model").get<std::string>();
            row.accuracy = j.at("metrics").at("accuracy").get<double>();
            row.notes = "scheme=" + j.at("scheme").get<std::string>() +
                        ", features=" + j.at("features").at("mode").get<std::string>() +
                        ", seed=" + std::to_string(j.at("seed").get<std::uint64_t>());
            rows.push_back(std::move(row));
        } catch (const nlohmann::json::exception& e) {
            bloomclf::raise(ErrorKind::ParseError,
                            path + ": not an experiment report (" + e.what() + ")");
        }
    }
    std::string table = bloomclf::comparative_markdown(rows);
    if (args.out.empty()) {
        std::cout << table;
    } else {
        write_text_file(args.out, table);
        std::cout << "wrote " << args.out << "\n";
    }
}

struct ReplayArgs {
    std::string manifest;
    std::string out_dir;
};

void run_replay(const ReplayArgs& args) {
    bloomclf::ExperimentOptions opt = bloomclf::load_manifest(args.manifest);
    bloomclf::ExperimentResult result = bloomclf::run_experiment(opt);
    bloomclf::ArtifactPaths paths = bloomclf::write_artifacts(result, args.out_dir);
    report_run(result, paths);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Question complexity metrics and Bloom-level classifiers"};
    app.set_version_flag("--version", bloomclf::kVersion);
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "Per-question metrics and corpus summary");
    analyze->add_option("--corpus", analyze_args.corpus, "Corpus CSV or JSONL")->required();
    analyze->add_option("--out-dir", analyze_args.out_dir, "Output directory")->required();
    analyze->add_option("--format", analyze_args.format, "json, markdown or both");

    ExperimentArgs exp_args;
    CLI::App* experiment =
        app.add_subcommand("experiment", "Train and evaluate one experiment");
    experiment->add_option("name", exp_args.name, "exp1..exp5 or custom")->required();
    experiment->add_option("--corpus", exp_args.corpus, "Corpus CSV or JSONL")->required();
    experiment->add_option("--out-dir", exp_args.out_dir, "Output directory")->required();
    auto* o_seed = experiment->add_option("--seed", exp_args.seed, "RNG seed");
    auto* o_split =
        experiment->add_option("--split-fraction", exp_args.split_fraction,
                               "Validation fraction (default 0.2)");
    auto* o_scheme = experiment->add_option("--scheme", exp_args.scheme,
                                            "full6, merged4 or merged3");
    auto* o_features = experiment->add_option("--features", exp_args.features,
                                              "metrics, tfidf, both or counts");
    auto* o_model = experiment->add_option("--model", exp_args.model,
                                           "logreg, naive_bayes or linear_svc");
    auto* o_format = experiment->add_option("--format", exp_args.format, "json, markdown or both");
    experiment->add_flag("--balance", exp_args.balance_on, "Balance classes before splitting");
    experiment->add_flag("--no-balance", exp_args.balance_off, "Disable balancing");
    auto* o_l2 = experiment->add_option("--l2-lambda", exp_args.l2_lambda,
                                        "L2 strength (logreg or linear_svc)");
    auto* o_lr = experiment->add_option("--learning-rate", exp_args.learning_rate,
                                        "Logreg learning rate");
    auto* o_iters = experiment->add_option("--max-iters", exp_args.max_iters,
                                           "Logreg iteration cap");
    auto* o_tol = experiment->add_option("--tol", exp_args.tol, "Logreg convergence tolerance");
    auto* o_alpha = experiment->add_option("--alpha", exp_args.alpha,
                                           "Naive Bayes smoothing");
    auto* o_epochs = experiment->add_option("--epochs", exp_args.epochs, "SVC epochs");

    PredictArgs predict_args;
    CLI::App* predict = app.add_subcommand("predict", "Predict with a saved model");
    predict->add_option("--model", predict_args.model, "Model JSON path")->required();
    auto* p_corpus = predict->add_option("--corpus", predict_args.corpus, "Batch corpus");
    auto* p_text = predict->add_option("--text", predict_args.text, "Single question text");
    p_corpus->excludes(p_text);
    p_text->excludes(p_corpus);
    predict->add_flag("--proba", predict_args.proba, "Also print class probabilities");

    DatagenArgs datagen_args;
    CLI::App* datagen = app.add_subcommand("datagen", "Generate a synthetic labeled corpus");
    datagen->add_option("--n-per-level", datagen_args.n_per_level, "Questions per level")
        ->required()
        ->check(CLI::PositiveNumber);
    datagen->add_option("--seed", datagen_args.seed, "RNG seed");
    datagen->add_option("--banks", datagen_args.banks, "Verb/template bank file (default: embedded)");
    datagen->add_option("--out", datagen_args.out, "Output corpus CSV")->required();

    CompareArgs compare_args;
    CLI::App* compare = app.add_subcommand("compare", "Comparative table from report.json files");
    compare->add_option("reports", compare_args.reports, "report.json paths")
        ->required()
        ->expected(-1);
    compare->add_option("--out", compare_args.out, "Write markdown here instead of stdout");

    ReplayArgs replay_args;
    CLI::App* replay = app.add_subcommand("replay", "Re-run an experiment from its manifest");
    replay->add_option("--manifest", replay_args.manifest, "manifest.json path")->required();
    replay->add_option("--out-dir", replay_args.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);

        if (*analyze) run_analyze(analyze_args);
        if (*experiment) {
            exp_args.has_seed = o_seed->count() > 0;
            exp_args.has_split = o_split->count() > 0;
            exp_args.has_scheme = o_scheme->count() > 0;
            exp_args.has_features = o_features->count() > 0;
            exp_args.has_model = o_model->count() > 0;
            exp_args.has_format = o_format->count() > 0;
            exp_args.has_l2 = o_l2->count() > 0;
            exp_args.has_lr = o_lr->count() > 0;
            exp_args.has_max_iters = o_iters->count() > 0;
            exp_args.has_tol = o_tol->count() > 0;
            exp_args.has_alpha = o_alpha->count() > 0;
            exp_args.has_epochs = o_epochs->count() > 0;
            run_experiment_cmd(exp_args);
        }
        if (*predict) {
            predict_args.has_text = p_text->count() > 0;
            run_predict(predict_args);
        }
        if (*datagen) run_datagen(datagen_args);
        if (*compare) run_compare(compare_args);
        if (*replay) run_replay(replay_args);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        print_error_line("UsageError", e.what());
        return 2;
    } catch (const Error& e) {
        print_error_line(bloomclf::to_string(e.kind()), e.message());
        return 2;
    } catch (const std::exception& e) {
        print_error_line("Internal", e.what());
        return 1;
    }
}
