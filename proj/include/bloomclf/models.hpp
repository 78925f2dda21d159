#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bloomclf/dataset.hpp"
#include "bloomclf/features.hpp"

namespace bloomclf {

enum class ModelKind {
    LogReg,
    NaiveBayes,
    LinearSvc,
};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct LogRegHyperparams {
    double l2_lambda = 1e-3;
    double learning_rate = 0.5;
    int max_iters = 500;
    double tol = 1e-7;
    std::uint64_t seed = 0;

    bool operator==(const LogRegHyperparams&) const = default;
};

struct NaiveBayesHyperparams {
    double alpha = 1.0;

    bool operator==(const NaiveBayesHyperparams&) const = default;
};

struct SvcHyperparams {
    double l2_lambda = 1e-4;
    int epochs = 20;
    std::uint64_t seed = 0;

    bool operator==(const SvcHyperparams&) const = default;
};

/* Multinomial logistic regression. Weights are row-major: weights[k * dim + d]. */
struct LogRegModel {
    int classes = 0;
    int dim = 0;
    std::vector<double> weights;
    std::vector<double> bias;
    LogRegHyperparams hyperparams;
    int iterations_run = 0;
    double final_loss = 0.0;
};

/* Multinomial naive Bayes over raw term counts. */
struct NaiveBayesModel {
    int classes = 0;
    int vocab_size = 0;
    std::vector<double> log_prior;       // classes
    std::vector<double> log_likelihood;  // classes * vocab_size, row-major
    NaiveBayesHyperparams hyperparams;
};

/* One-vs-rest linear SVC trained with Pegasos-style SGD. */
struct LinearSvcModel {
    int classes = 0;
    int dim = 0;
    std::vector<double> weights;  // classes * dim, row-major
    std::vector<double> bias;
    SvcHyperparams hyperparams;
};

// Mean cross-entropy plus (l2_lambda/2)*||W||^2; gradients optional (pass
// nullptr to skip). Exposed so tests can check the gradient numerically.
double logreg_loss_and_gradient(const std::vector<double>& weights,
                                const std::vector<double>& bias,
                                int classes,
                                const FeatureMatrix& x,
                                const std::vector<int>& y,
                                double l2_lambda,
                                std::vector<double>* grad_weights,
                                std::vector<double>* grad_bias);

LogRegModel train_logreg(const FeatureMatrix& x, const std::vector<int>& y,
                         int class_count, const LogRegHyperparams& hp);

NaiveBayesModel train_naive_bayes(const FeatureMatrix& x, const std::vector<int>& y,
                                  int class_count, const NaiveBayesHyperparams& hp);

// Single Pegasos update at step t (1-based). Decays w by (1 - eta*lambda)
// and, when the margin is violated, adds eta*y*x and moves the bias.
void pegasos_step(std::vector<double>& w, double& b, const SparseVector& x,
                  int y_pm, double l2_lambda, std::uint64_t t);

// Binary SVC objective (l2_lambda/2)*||w||^2 + mean hinge; for tests.
double svc_binary_objective(const std::vector<double>& w, double b,
                            const FeatureMatrix& x, const std::vector<int>& y_pm,
                            double l2_lambda);

LinearSvcModel train_linear_svc(const FeatureMatrix& x, const std::vector<int>& y,
                                int class_count, const SvcHyperparams& hp);

struct TrainedModel {
    ModelKind kind = ModelKind::LogReg;
    LabelScheme scheme;
    FittedFeatures features;
    std::variant<LogRegModel, NaiveBayesModel, LinearSvcModel> params;
};

// Raw decision scores, one per class (log-posteriors for naive Bayes,
// softmax logits for logreg, margins for SVC).
std::vector<double> predict_scores(const TrainedModel& model, const SparseVector& x);

// Ties break toward the lowest class index.
int predict(const TrainedModel& model, const SparseVector& x);
std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& x);

// Normalized class probabilities; empty optional for SVC (margins are not
// calibrated).
std::optional<std::vector<double>> predict_proba(const TrainedModel& model,
                                                 const SparseVector& x);

int predict_text(const TrainedModel& model, std::string_view text);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

}  // namespace bloomclf
