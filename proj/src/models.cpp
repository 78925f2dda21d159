#include "bloomclf/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "bloomclf/errors.hpp"
#include "bloomclf/rng.hpp"
#include "bloomclf/textmetrics.hpp"

namespace bloomclf {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::LogReg: return "logreg";
        case ModelKind::NaiveBayes: return "naive_bayes";
        case ModelKind::LinearSvc: return "linear_svc";
    }
    raise(ErrorKind::InvalidArgument, "unknown model kind");
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "logreg") return ModelKind::LogReg;
    if (name == "naive_bayes") return ModelKind::NaiveBayes;
    if (name == "linear_svc") return ModelKind::LinearSvc;
    raise(ErrorKind::InvalidArgument,
          "unknown model kind \"" + name + "\" (expected logreg, naive_bayes or linear_svc)");
}

namespace {

void check_training_inputs(const FeatureMatrix& x, const std::vector<int>& y,
                           int class_count) {
    if (x.rows != y.size()) {
        raise(ErrorKind::DimensionMismatch,
              "feature matrix has " + std::to_string(x.rows) + " rows but " +
                  std::to_string(y.size()) + " labels");
    }
    if (x.rows == 0) raise(ErrorKind::EmptyMatrix, "no training documents");
    if (class_count < 2) {
        raise(ErrorKind::SingleClass, "need at least two classes, got " +
                                          std::to_string(class_count));
    }
    std::set<int> seen;
    for (int label : y) {
        if (label < 0 || label >= class_count) {
            raise(ErrorKind::IndexOutOfRange,
                  "label " + std::to_string(label) + " outside [0, " +
                      std::to_string(class_count) + ")");
        }
        seen.insert(label);
    }
    if (seen.size() < 2) {
        raise(ErrorKind::SingleClass, "training labels contain a single class");
    }
}

double sparse_dot(const std::vector<double>& w, std::size_t offset,
                  const SparseVector& x) {
    double sum = 0.0;
    for (const auto& [col, value] : x.entries) sum += w[offset + col] * value;
    return sum;
}

}  // namespace

double logreg_loss_and_gradient(const std::vector<double>& weights,
                                const std::vector<double>& bias,
                                int classes,
                                const FeatureMatrix& x,
                                const std::vector<int>& y,
                                double l2_lambda,
                                std::vector<double>* grad_weights,
                                std::vector<double>* grad_bias) {
    const std::size_t k = static_cast<std::size_t>(classes);
    const std::size_t d = x.cols;
    const std::size_t n = x.rows;
    if (weights.size() != k * d || bias.size() != k) {
        raise(ErrorKind::DimensionMismatch, "parameter shape does not match data");
    }
    if (grad_weights) grad_weights->assign(k * d, 0.0);
    if (grad_bias) grad_bias->assign(k, 0.0);

    double loss = 0.0;
    std::vector<double> scores(k);
    for (std::size_t i = 0; i < n; ++i) {
        const SparseVector& row = x.row_data[i];
        for (std::size_t c = 0; c < k; ++c) {
            scores[c] = bias[c] + sparse_dot(weights, c * d, row);
        }
        double max_score = *std::max_element(scores.begin(), scores.end());
        double denom = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            scores[c] = std::exp(scores[c] - max_score);
            denom += scores[c];
        }
        const std::size_t gold = static_cast<std::size_t>(y[i]);
        loss -= std::log(scores[gold] / denom);
        if (grad_weights || grad_bias) {
            for (std::size_t c = 0; c < k; ++c) {
                double p = scores[c] / denom;
                double residual = p - (c == gold ? 1.0 : 0.0);
                if (grad_bias) (*grad_bias)[c] += residual;
                if (grad_weights) {
                    for (const auto& [col, value] : row.entries) {
                        (*grad_weights)[c * d + col] += residual * value;
                    }
                }
            }
        }
    }
    loss /= static_cast<double>(n);

    double reg = 0.0;
    for (double w : weights) reg += w * w;
    loss += 0.5 * l2_lambda * reg;

    if (grad_weights) {
        for (std::size_t j = 0; j < k * d; ++j) {
            (*grad_weights)[j] = (*grad_weights)[j] / static_cast<double>(n) +
                                 l2_lambda * weights[j];
        }
    }
    if (grad_bias) {
        for (std::size_t c = 0; c < k; ++c) {
            (*grad_bias)[c] /= static_cast<double>(n);
        }
    }
    return loss;
}

LogRegModel train_logreg(const FeatureMatrix& x, const std::vector<int>& y,
                         int class_count, const LogRegHyperparams& hp) {
    check_training_inputs(x, y, class_count);
    if (hp.max_iters < 1) raise(ErrorKind::InvalidArgument, "max_iters must be positive");
    if (hp.learning_rate <= 0.0) raise(ErrorKind::InvalidArgument, "learning_rate must be positive");

    LogRegModel model;
    model.classes = class_count;
    model.dim = static_cast<int>(x.cols);
    model.weights.assign(static_cast<std::size_t>(class_count) * x.cols, 0.0);
    model.bias.assign(static_cast<std::size_t>(class_count), 0.0);
    model.hyperparams = hp;

    std::vector<double> grad_w, grad_b;
    double prev_loss = std::numeric_limits<double>::infinity();
    double loss = prev_loss;
    int iters = 0;
    for (int t = 0; t < hp.max_iters; ++t) {
        loss = logreg_loss_and_gradient(model.weights, model.bias, class_count, x, y,
                                        hp.l2_lambda, &grad_w, &grad_b);
        if (!std::isfinite(loss)) {
            raise(ErrorKind::NonFiniteLoss,
                  "loss became non-finite at iteration " + std::to_string(t));
        }
        if (prev_loss - loss < hp.tol) break;
        for (std::size_t j = 0; j < model.weights.size(); ++j) {
            model.weights[j] -= hp.learning_rate * grad_w[j];
        }
        for (std::size_t c = 0; c < model.bias.size(); ++c) {
            model.bias[c] -= hp.learning_rate * grad_b[c];
        }
        prev_loss = loss;
        iters = t + 1;
    }
    model.iterations_run = iters;
    model.final_loss = logreg_loss_and_gradient(model.weights, model.bias, class_count,
                                                x, y, hp.l2_lambda, nullptr, nullptr);
    if (!std::isfinite(model.final_loss)) {
        raise(ErrorKind::NonFiniteLoss, "final loss is non-finite");
    }
    return model;
}

NaiveBayesModel train_naive_bayes(const FeatureMatrix& x, const std::vector<int>& y,
                                  int class_count, const NaiveBayesHyperparams& hp) {
    check_training_inputs(x, y, class_count);
    if (!(hp.alpha > 0.0)) raise(ErrorKind::InvalidArgument, "alpha must be positive");
    const std::size_t k = static_cast<std::size_t>(class_count);
    const std::size_t v = x.cols;
    if (v == 0) raise(ErrorKind::EmptyVocabulary, "count matrix has zero columns");

    std::vector<std::size_t> class_docs(k, 0);
    std::vector<double> counts(k * v, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const std::size_t c = static_cast<std::size_t>(y[i]);
        ++class_docs[c];
        for (const auto& [col, value] : x.row_data[i].entries) {
            if (value < 0.0) {
                raise(ErrorKind::NegativeCount,
                      "negative count at row " + std::to_string(i) + ", column " +
                          std::to_string(col));
            }
            counts[c * v + col] += value;
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (class_docs[c] == 0) {
            raise(ErrorKind::ClassTooSmall,
                  "class " + std::to_string(c) + " has no training documents");
        }
    }

    NaiveBayesModel model;
    model.classes = class_count;
    model.vocab_size = static_cast<int>(v);
    model.hyperparams = hp;
    model.log_prior.resize(k);
    model.log_likelihood.resize(k * v);
    const double n = static_cast<double>(x.rows);
    for (std::size_t c = 0; c < k; ++c) {
        model.log_prior[c] = std::log(static_cast<double>(class_docs[c]) / n);
        double total = std::accumulate(counts.begin() + c * v,
                                       counts.begin() + (c + 1) * v, 0.0);
        double denom = total + hp.alpha * static_cast<double>(v);
        for (std::size_t t = 0; t < v; ++t) {
            model.log_likelihood[c * v + t] = std::log((counts[c * v + t] + hp.alpha) / denom);
        }
    }
    return model;
}

void pegasos_step(std::vector<double>& w, double& b, const SparseVector& x,
                  int y_pm, double l2_lambda, std::uint64_t t) {
    const double eta = 1.0 / (l2_lambda * static_cast<double>(t));
    const double margin = static_cast<double>(y_pm) * (sparse_dot(w, 0, x) + b);
    const double decay = 1.0 - eta * l2_lambda;
    for (double& wj : w) wj *= decay;
    if (margin < 1.0) {
        for (const auto& [col, value] : x.entries) {
            w[col] += eta * static_cast<double>(y_pm) * value;
        }
        b += eta * static_cast<double>(y_pm);
    }
}

double svc_binary_objective(const std::vector<double>& w, double b,
                            const FeatureMatrix& x, const std::vector<int>& y_pm,
                            double l2_lambda) {
    if (x.rows != y_pm.size()) {
        raise(ErrorKind::DimensionMismatch, "objective: rows and labels differ");
    }
    double reg = 0.0;
    for (double wj : w) reg += wj * wj;
    double hinge = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        double margin = static_cast<double>(y_pm[i]) * (sparse_dot(w, 0, x.row_data[i]) + b);
        hinge += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * l2_lambda * reg + hinge / static_cast<double>(x.rows);
}

LinearSvcModel train_linear_svc(const FeatureMatrix& x, const std::vector<int>& y,
                                int class_count, const SvcHyperparams& hp) {
    check_training_inputs(x, y, class_count);
    if (hp.epochs < 1) raise(ErrorKind::InvalidArgument, "epochs must be positive");
    if (!(hp.l2_lambda > 0.0)) raise(ErrorKind::InvalidArgument, "l2_lambda must be positive");

    LinearSvcModel model;
    model.classes = class_count;
    model.dim = static_cast<int>(x.cols);
    model.weights.assign(static_cast<std::size_t>(class_count) * x.cols, 0.0);
    model.bias.assign(static_cast<std::size_t>(class_count), 0.0);
    model.hyperparams = hp;

    std::vector<std::size_t> order(x.rows);
    for (int c = 0; c < class_count; ++c) {
        Rng rng(hp.seed + static_cast<std::uint64_t>(c));
        std::vector<double> w(x.cols, 0.0);
        double b = 0.0;
        std::uint64_t t = 1;
        for (int epoch = 0; epoch < hp.epochs; ++epoch) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            shuffle_in_place(order, rng);
            for (std::size_t i : order) {
                int y_pm = (y[i] == c) ? 1 : -1;
                pegasos_step(w, b, x.row_data[i], y_pm, hp.l2_lambda, t);
                ++t;
            }
        }
        std::copy(w.begin(), w.end(),
                  model.weights.begin() + static_cast<std::size_t>(c) * x.cols);
        model.bias[static_cast<std::size_t>(c)] = b;
    }
    return model;
}

std::vector<double> predict_scores(const TrainedModel& model, const SparseVector& x) {
    const int k = model.scheme.class_count();
    int dim = 0;
    if (const auto* lr = std::get_if<LogRegModel>(&model.params)) dim = lr->dim;
    else if (const auto* nb = std::get_if<NaiveBayesModel>(&model.params)) dim = nb->vocab_size;
    else dim = std::get<LinearSvcModel>(model.params).dim;
    if (!x.entries.empty() && x.entries.back().first >= dim) {
        raise(ErrorKind::DimensionMismatch,
              "feature index " + std::to_string(x.entries.back().first) +
                  " outside model dimension " + std::to_string(dim));
    }
    std::vector<double> scores(static_cast<std::size_t>(k), 0.0);
    if (std::holds_alternative<LogRegModel>(model.params)) {
        const auto& m = std::get<LogRegModel>(model.params);
        for (int c = 0; c < k; ++c) {
            scores[c] = m.bias[c] +
                        sparse_dot(m.weights, static_cast<std::size_t>(c) * m.dim, x);
        }
    } else if (std::holds_alternative<NaiveBayesModel>(model.params)) {
        const auto& m = std::get<NaiveBayesModel>(model.params);
        for (int c = 0; c < k; ++c) {
            double s = m.log_prior[c];
            for (const auto& [col, value] : x.entries) {
                s += value * m.log_likelihood[static_cast<std::size_t>(c) * m.vocab_size + col];
            }
            scores[c] = s;
        }
    } else {
        const auto& m = std::get<LinearSvcModel>(model.params);
        for (int c = 0; c < k; ++c) {
            scores[c] = m.bias[c] +
                        sparse_dot(m.weights, static_cast<std::size_t>(c) * m.dim, x);
        }
    }
    return scores;
}

int predict(const TrainedModel& model, const SparseVector& x) {
    std::vector<double> scores = predict_scores(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return static_cast<int>(best);
}

std::vector<int> predict(const TrainedModel& model, const FeatureMatrix& x) {
    std::vector<int> out;
    out.reserve(x.rows);
    for (const SparseVector& row : x.row_data) out.push_back(predict(model, row));
    return out;
}

std::optional<std::vector<double>> predict_proba(const TrainedModel& model,
                                                 const SparseVector& x) {
    if (std::holds_alternative<LinearSvcModel>(model.params)) return std::nullopt;
    std::vector<double> scores = predict_scores(model, x);
    double max_score = *std::max_element(scores.begin(), scores.end());
    double denom = 0.0;
    for (double& s : scores) {
        s = std::exp(s - max_score);
        denom += s;
    }
    for (double& s : scores) s /= denom;
    return scores;
}

int predict_text(const TrainedModel& model, std::string_view text) {
    TokenizedText doc = tokenize(text);
    return predict(model, featurize(doc, model.features));
}

}  // namespace bloomclf
