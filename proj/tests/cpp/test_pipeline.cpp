#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "bloomclf/datagen.hpp"
#include "bloomclf/errors.hpp"
#include "bloomclf/pipeline.hpp"

using namespace bloomclf;
namespace fs = std::filesystem;

namespace {

std::string message_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.message();
    }
    FAIL("expected an Error");
    return {};
}

std::vector<QuestionRecord> sample_corpus(int per_level, std::uint64_t seed) {
    return generate(per_level, seed, default_banks()).records;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

} // namespace

TEST_CASE("the five presets map to the experiment ladder") {
    auto exp1 = experiment_preset("exp1");
    CHECK(exp1.model == ModelKind::LogReg);
    CHECK(exp1.features.mode == FeatureMode::Metrics);
    CHECK(exp1.scheme == "full6");
    CHECK(exp1.balance);

    auto exp2 = experiment_preset("exp2");
    CHECK(exp2.scheme == "merged4");
    CHECK(exp2.model == ModelKind::LogReg);
    CHECK(exp2.balance);

    auto exp3 = experiment_preset("exp3");
    CHECK(exp3.scheme == "merged3");
    CHECK(exp3.features.mode == FeatureMode::Metrics);
    CHECK(exp3.balance);

    auto exp4 = experiment_preset("exp4");
    CHECK(exp4.model == ModelKind::NaiveBayes);
    CHECK(exp4.features.mode == FeatureMode::Counts);
    CHECK(exp4.features.metric_scaling == MetricScaling::None);
    CHECK(exp4.scheme == "full6");
    CHECK_FALSE(exp4.balance);

    auto exp5 = experiment_preset("exp5");
    CHECK(exp5.model == ModelKind::LinearSvc);
    CHECK(exp5.features.mode == FeatureMode::Tfidf);
    CHECK_FALSE(exp5.balance);

    CHECK(experiment_names().size() == 5);
    CHECK_THROWS_AS(experiment_preset("exp9"), Error);
}

TEST_CASE("exp2 trains on merged4 classes over a generated corpus") {
    auto options = experiment_preset("exp2");
    options.seed = 5;
    auto result = run_experiment(options, sample_corpus(30, 5));

    CHECK(result.scheme.name == "Merged4");
    CHECK(result.report.class_names ==
          std::vector<std::string>{"Knowledge", "Comprehension", "Application", "Higher-Order"});
    CHECK(result.corpus_size == 180);
    CHECK(result.balanced_size == 180); // generated corpora are already uniform
    CHECK(result.validation_size == 36);
    CHECK(result.train_size == 144);
    CHECK(result.report.accuracy > 0.5);
    CHECK(result.model.kind == ModelKind::LogReg);
}

TEST_CASE("exp3 collapses to three classes") {
    auto options = experiment_preset("exp3");
    options.seed = 11;
    auto result = run_experiment(options, sample_corpus(20, 11));
    CHECK(result.report.class_names ==
          std::vector<std::string>{"Knowledge", "Mid-Order", "Higher-Order"});
    CHECK(result.report.matrix.classes == 3);
}

TEST_CASE("stage failures carry the stage name") {
    ExperimentOptions options;
    options.balance = false;

    // One lonely Synthesis record breaks the split stage.
    std::vector<QuestionRecord> corpus;
    int synthesis_kept = 0;
    for (const QuestionRecord& r : sample_corpus(3, 1)) {
        if (r.level == BloomLevel::Synthesis && synthesis_kept++ > 0) continue;
        corpus.push_back(r);
    }
    auto msg = message_of([&] { run_experiment(options, corpus); });
    CHECK(msg.find("stage split:") != std::string::npos);

    // An impossible min_df breaks the features stage.
    ExperimentOptions strict;
    strict.balance = false;
    strict.features.min_df = 10000;
    msg = message_of([&] { run_experiment(strict, sample_corpus(4, 2)); });
    CHECK(msg.find("stage features:") != std::string::npos);

    try {
        run_experiment(strict, sample_corpus(4, 2));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyVocabulary);
    }

    CHECK_THROWS_AS(run_experiment(ExperimentOptions{}, {}), Error);
}

TEST_CASE("write_artifacts respects the output format") {
    auto options = experiment_preset("exp4");
    options.seed = 3;
    auto corpus = sample_corpus(10, 3);

    {
        TempDir dir("bloomclf_artifacts_both");
        options.format = OutputFormat::Both;
        auto result = run_experiment(options, corpus);
        auto paths = write_artifacts(result, dir.path.string());
        CHECK(fs::exists(paths.report_json));
        CHECK(fs::exists(paths.report_md));
        CHECK(fs::exists(paths.model_json));
        CHECK(fs::exists(paths.manifest_json));
    }
    {
        TempDir dir("bloomclf_artifacts_json");
        options.format = OutputFormat::Json;
        auto result = run_experiment(options, corpus);
        auto paths = write_artifacts(result, dir.path.string());
        CHECK(paths.report_md.empty());
        CHECK(fs::exists(paths.report_json));
        CHECK(fs::exists(paths.model_json));
    }
    {
        TempDir dir("bloomclf_artifacts_md");
        options.format = OutputFormat::Markdown;
        auto result = run_experiment(options, corpus);
        auto paths = write_artifacts(result, dir.path.string());
        CHECK(paths.report_json.empty());
        CHECK(fs::exists(paths.report_md));
    }
}

TEST_CASE("manifests round-trip every option") {
    ExperimentOptions options;
    options.name = "custom";
    options.corpus_path = "somewhere/questions.csv";
    options.scheme = "merged4";
    options.model = ModelKind::LinearSvc;
    options.features.mode = FeatureMode::Both;
    options.features.sublinear_tf = true;
    options.features.min_df = 2;
    options.features.metric_scaling = MetricScaling::None;
    options.balance = true;
    options.seed = 99;
    options.split_fraction = 0.25;
    options.format = OutputFormat::Json;
    options.logreg.l2_lambda = 0.5;
    options.logreg.learning_rate = 0.1;
    options.logreg.max_iters = 42;
    options.logreg.tol = 1e-6;
    options.naive_bayes.alpha = 2.0;
    options.svc.l2_lambda = 3e-4;
    options.svc.epochs = 7;

    auto copy = options_from_manifest_json(manifest_to_json(options));
    // Seeds ride along inside the hyperparameter blocks at run time.
    copy.logreg.seed = options.logreg.seed;
    copy.svc.seed = options.svc.seed;
    CHECK(copy == options);
}

TEST_CASE("manifest files replay to identical artifacts") {
    auto corpus = sample_corpus(12, 21);
    auto options = experiment_preset("exp5");
    options.seed = 21;

    TempDir first("bloomclf_replay_a");
    auto result = run_experiment(options, corpus);
    auto paths = write_artifacts(result, first.path.string());

    auto replayed_options = load_manifest(paths.manifest_json);
    CHECK(replayed_options.name == "exp5");
    CHECK(replayed_options.seed == 21);

    TempDir second("bloomclf_replay_b");
    auto replayed = run_experiment(replayed_options, corpus);
    auto second_paths = write_artifacts(replayed, second.path.string());

    CHECK(slurp(second_paths.report_json) == slurp(paths.report_json));
    CHECK(slurp(second_paths.model_json) == slurp(paths.model_json));
    CHECK(slurp(second_paths.report_md) == slurp(paths.report_md));
}

TEST_CASE("repeated runs are byte-identical") {
    auto corpus = sample_corpus(15, 8);
    auto options = experiment_preset("exp2");
    options.seed = 8;

    auto a = run_experiment(options, corpus);
    auto b = run_experiment(options, corpus);
    CHECK(report_json_document(a) == report_json_document(b));
    CHECK(report_markdown_document(a) == report_markdown_document(b));
    CHECK(model_to_json(a.model) == model_to_json(b.model));
    CHECK(manifest_to_json(a.options) == manifest_to_json(b.options));
}

TEST_CASE("run_experiment loads the corpus from disk") {
    TempDir dir("bloomclf_pipeline_load");
    auto corpus = sample_corpus(8, 14);
    fs::path csv = dir.path / "questions.csv";
    write_corpus_csv(csv, corpus);

    auto options = experiment_preset("exp4");
    options.corpus_path = csv.string();
    options.seed = 14;
    auto result = run_experiment(options);
    CHECK(result.corpus_size == corpus.size());
    CHECK(result.options.corpus_path == csv.string());
}

TEST_CASE("markdown report document names the experiment") {
    auto options = experiment_preset("exp2");
    options.seed = 4;
    auto result = run_experiment(options, sample_corpus(10, 4));
    std::string md = report_markdown_document(result);
    CHECK(md.find("# Experiment report: exp2") != std::string::npos);
    CHECK(md.find("## Results") != std::string::npos);
    CHECK(md.find("| Level | Precision | Recall | F1-score |") != std::string::npos);
    CHECK(md.find("## Confusion matrix") != std::string::npos);
}

TEST_CASE("output format names round-trip") {
    for (OutputFormat f : {OutputFormat::Json, OutputFormat::Markdown, OutputFormat::Both}) {
        auto parsed = parse_output_format(to_string(f));
        REQUIRE(parsed.has_value());
        CHECK(*parsed == f);
    }
    CHECK_FALSE(parse_output_format("yaml").has_value());
}
