#include <doctest.h>

#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bloomclf/dataset.hpp"
#include "bloomclf/errors.hpp"
#include "bloomclf/features.hpp"
#include "bloomclf/models.hpp"
#include "bloomclf/textmetrics.hpp"

using namespace bloomclf;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an Error");
    return ErrorKind::IoError;
}

const std::vector<std::string>& sample_texts() {
    static const std::vector<std::string> texts = {
        "Define the operating system kernel.",
        "List the layers of the network stack.",
        "Explain how paging differs from segmentation.",
        "Summarize the boot sequence briefly.",
        "Evaluate the scheduler design against fairness goals.",
        "Justify the choice of a write-back cache.",
    };
    return texts;
}

// Two texts per class, three classes.
std::vector<int> sample_labels() { return {0, 0, 1, 1, 2, 2}; }

TrainedModel train_sample(ModelKind kind) {
    std::vector<TokenizedText> docs;
    for (const auto& text : sample_texts()) docs.push_back(tokenize(text));

    FeatureConfig config;
    if (kind == ModelKind::NaiveBayes) config.mode = FeatureMode::Counts;
    else if (kind == ModelKind::LogReg) config.mode = FeatureMode::Both;
    else config.mode = FeatureMode::Tfidf;

    TrainedModel model;
    model.kind = kind;
    model.scheme = LabelScheme::merged3();
    model.features = fit_features(docs, config);
    auto x = transform_all(docs, model.features);
    auto y = sample_labels();

    if (kind == ModelKind::LogReg) {
        LogRegHyperparams hp;
        hp.max_iters = 80;
        model.params = train_logreg(x, y, 3, hp);
    } else if (kind == ModelKind::NaiveBayes) {
        model.params = train_naive_bayes(x, y, 3, NaiveBayesHyperparams{});
    } else {
        SvcHyperparams hp;
        hp.seed = 9;
        model.params = train_linear_svc(x, y, 3, hp);
    }
    return model;
}

std::vector<int> predictions_on_samples(const TrainedModel& model) {
    std::vector<int> out;
    for (const auto& text : sample_texts()) out.push_back(predict_text(model, text));
    return out;
}

} // namespace

TEST_CASE("model json starts with the format version") {
    auto model = train_sample(ModelKind::LogReg);
    std::string text = model_to_json(model);
    CHECK(text.rfind("{\n  \"format_version\": 1,", 0) == 0);
}

TEST_CASE("logreg round-trips exactly") {
    auto model = train_sample(ModelKind::LogReg);
    auto copy = model_from_json(model_to_json(model));

    CHECK(copy.kind == ModelKind::LogReg);
    CHECK(copy.scheme == model.scheme);
    CHECK(copy.features.config == model.features.config);
    CHECK(copy.features.dim == model.features.dim);
    CHECK(copy.features.vocab.terms == model.features.vocab.terms);
    CHECK(copy.features.vocab.document_frequency == model.features.vocab.document_frequency);
    CHECK(copy.features.vocab.document_count == model.features.vocab.document_count);
    REQUIRE(copy.features.scaler.has_value() == model.features.scaler.has_value());
    if (model.features.scaler) {
        CHECK(copy.features.scaler->mean == model.features.scaler->mean);
        CHECK(copy.features.scaler->stddev == model.features.scaler->stddev);
    }

    const auto& a = std::get<LogRegModel>(model.params);
    const auto& b = std::get<LogRegModel>(copy.params);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    CHECK(a.hyperparams == b.hyperparams);
    CHECK(a.iterations_run == b.iterations_run);
    CHECK(a.final_loss == b.final_loss);

    CHECK(predictions_on_samples(copy) == predictions_on_samples(model));
}

TEST_CASE("naive bayes round-trips exactly") {
    auto model = train_sample(ModelKind::NaiveBayes);
    auto copy = model_from_json(model_to_json(model));
    const auto& a = std::get<NaiveBayesModel>(model.params);
    const auto& b = std::get<NaiveBayesModel>(copy.params);
    CHECK(a.log_prior == b.log_prior);
    CHECK(a.log_likelihood == b.log_likelihood);
    CHECK(a.hyperparams == b.hyperparams);
    CHECK(a.vocab_size == b.vocab_size);
    CHECK(predictions_on_samples(copy) == predictions_on_samples(model));
}

TEST_CASE("linear svc round-trips exactly") {
    auto model = train_sample(ModelKind::LinearSvc);
    auto copy = model_from_json(model_to_json(model));
    const auto& a = std::get<LinearSvcModel>(model.params);
    const auto& b = std::get<LinearSvcModel>(copy.params);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    CHECK(a.hyperparams == b.hyperparams);
    CHECK(predictions_on_samples(copy) == predictions_on_samples(model));
}

TEST_CASE("save and load through a file preserve predictions") {
    auto model = train_sample(ModelKind::LogReg);
    fs::path path = fs::temp_directory_path() / "bloomclf_test_model.json";
    save_model(model, path.string());
    auto loaded = load_model(path.string());
    fs::remove(path);
    CHECK(predictions_on_samples(loaded) == predictions_on_samples(model));

    // Saving the loaded model reproduces the same bytes.
    CHECK(model_to_json(loaded) == model_to_json(model));
}

TEST_CASE("version tampering raises VersionMismatch") {
    auto model = train_sample(ModelKind::NaiveBayes);
    std::string text = model_to_json(model);
    auto pos = text.find("\"format_version\": 1");
    REQUIRE(pos != std::string::npos);
    std::string tampered = text;
    tampered.replace(pos, std::string("\"format_version\": 1").size(), "\"format_version\": 99");
    CHECK(kind_of([&] { model_from_json(tampered); }) == ErrorKind::VersionMismatch);
}

TEST_CASE("truncated files report the byte offset") {
    auto model = train_sample(ModelKind::LinearSvc);
    std::string text = model_to_json(model);
    std::string truncated = text.substr(0, text.size() / 2);
    CHECK(kind_of([&] { model_from_json(truncated); }) == ErrorKind::CorruptFile);
    try {
        model_from_json(truncated);
    } catch (const Error& e) {
        CHECK(e.message().find("byte") != std::string::npos);
    }
}

TEST_CASE("unknown kind and shape mismatches are rejected") {
    auto model = train_sample(ModelKind::LogReg);
    std::string text = model_to_json(model);

    std::string bad_kind = text;
    auto pos = bad_kind.find("\"kind\": \"logreg\"");
    REQUIRE(pos != std::string::npos);
    bad_kind.replace(pos, std::string("\"kind\": \"logreg\"").size(), "\"kind\": \"oracle\"");
    CHECK(kind_of([&] { model_from_json(bad_kind); }) == ErrorKind::InvalidArgument);

    // Dropping one bias entry breaks the declared class count.
    const auto& lr = std::get<LogRegModel>(model.params);
    std::string needle = "\"bias\": [";
    pos = text.find(needle);
    REQUIRE(pos != std::string::npos);
    auto end = text.find(']', pos);
    std::string bad_bias = text.substr(0, pos + needle.size()) + "0.0" + text.substr(end);
    (void)lr;
    CHECK(kind_of([&] { model_from_json(bad_bias); }) == ErrorKind::CorruptFile);

    // Class count disagreeing with the scheme is caught.
    std::string bad_classes = text;
    pos = bad_classes.find("\"classes\": 3");
    REQUIRE(pos != std::string::npos);
    bad_classes.replace(pos, std::string("\"classes\": 3").size(), "\"classes\": 4");
    CHECK(kind_of([&] { model_from_json(bad_classes); }) == ErrorKind::CorruptFile);
}

TEST_CASE("missing file raises IoError") {
    CHECK(kind_of([] { load_model("definitely/not/here.json"); }) == ErrorKind::IoError);
}

TEST_CASE("non-finite parameters refuse to serialize") {
    auto model = train_sample(ModelKind::LogReg);
    auto& lr = std::get<LogRegModel>(model.params);
    lr.weights[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK(kind_of([&] { model_to_json(model); }) == ErrorKind::InvalidArgument);
}
