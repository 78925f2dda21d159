#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bloomclf/dataset.hpp"
#include "bloomclf/eval.hpp"
#include "bloomclf/features.hpp"
#include "bloomclf/models.hpp"

namespace bloomclf {

enum class OutputFormat { Json, Markdown, Both };

const char* to_string(OutputFormat format);
std::optional<OutputFormat> parse_output_format(std::string_view name);

// Complete state of one experiment run. Everything that influences the output
// bytes lives here, so a serialized copy (the manifest) can replay the run.
struct ExperimentOptions {
    std::string name = "custom";
    std::string corpus_path;
    std::string scheme = "full6";
    ModelKind model = ModelKind::LogReg;
    FeatureConfig features;
    bool balance = false;
    std::uint64_t seed = 0;
    double split_fraction = 0.2;
    OutputFormat format = OutputFormat::Both;
    LogRegHyperparams logreg;
    NaiveBayesHyperparams naive_bayes;
    SvcHyperparams svc;

    bool operator==(const ExperimentOptions&) const = default;
};

// The five presets mirror the experiment ladder: exp1 logreg/metrics/full6
// (balanced), exp2 logreg/metrics/merged4 (balanced), exp3
// logreg/metrics/merged3 (balanced), exp4 naive_bayes/counts/full6, exp5
// linear_svc/tfidf/full6.
ExperimentOptions experiment_preset(const std::string& name);
const std::vector<std::string>& experiment_names();

struct ExperimentResult {
    ExperimentOptions options;
    LabelScheme scheme;
    TrainedModel model;
    ClassificationReport report;
    std::size_t corpus_size = 0;    // as loaded
    std::size_t balanced_size = 0;  // after balancing (== corpus_size when off)
    std::size_t train_size = 0;
    std::size_t validation_size = 0;
};

// balance (optional) -> stratified split -> fit features on train -> train ->
// evaluate on validation. Stage failures are rethrown with the stage name.
ExperimentResult run_experiment(const ExperimentOptions& options,
                                std::vector<QuestionRecord> corpus);

// Same, loading options.corpus_path first.
ExperimentResult run_experiment(const ExperimentOptions& options);

struct ArtifactPaths {
    std::string report_json;  // empty when the format excludes it
    std::string report_md;    // empty when the format excludes it
    std::string model_json;
    std::string manifest_json;
};

ArtifactPaths write_artifacts(const ExperimentResult& result, const std::string& out_dir);

std::string report_json_document(const ExperimentResult& result);
std::string report_markdown_document(const ExperimentResult& result);

std::string manifest_to_json(const ExperimentOptions& options);
ExperimentOptions options_from_manifest_json(const std::string& text);
ExperimentOptions load_manifest(const std::string& path);

}  // namespace bloomclf
