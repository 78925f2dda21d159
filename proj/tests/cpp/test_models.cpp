#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bloomclf/errors.hpp"
#include "bloomclf/features.hpp"
#include "bloomclf/models.hpp"

using namespace bloomclf;

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

SparseVector sparse(std::vector<std::pair<int, double>> entries) {
    SparseVector vec;
    vec.entries = std::move(entries);
    return vec;
}

FeatureMatrix matrix_of(std::vector<SparseVector> rows, int cols) {
    FeatureMatrix m;
    m.rows = rows.size();
    m.cols = cols;
    m.row_data = std::move(rows);
    return m;
}

// Random dense-ish sparse matrix plus labels covering all classes.
struct RandomProblem {
    FeatureMatrix x;
    std::vector<int> y;
};

RandomProblem random_problem(int samples, int dim, int classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(-2.0, 2.0);
    RandomProblem p;
    std::vector<SparseVector> rows;
    for (int i = 0; i < samples; ++i) {
        SparseVector row;
        for (int d = 0; d < dim; ++d) {
            if (rng() % 4 != 0) row.entries.emplace_back(d, value(rng));
        }
        rows.push_back(std::move(row));
        p.y.push_back(i % classes);
    }
    p.x = matrix_of(std::move(rows), dim);
    return p;
}

// Three separable classes on one-hot-ish columns.
RandomProblem separable_problem(int per_class) {
    RandomProblem p;
    std::vector<SparseVector> rows;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < per_class; ++i) {
            rows.push_back(sparse({{c, 1.0}, {3, 0.1 * i}}));
            p.y.push_back(c);
        }
    }
    p.x = matrix_of(std::move(rows), 4);
    return p;
}

LabelScheme toy_scheme(int classes) {
    LabelScheme scheme;
    scheme.name = "toy";
    scheme.level_to_class = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < classes; ++i) scheme.class_names.push_back("c" + std::to_string(i));
    for (int l = 0; l < kBloomLevelCount; ++l) {
        scheme.level_to_class[l] = std::min(l, classes - 1);
    }
    return scheme;
}

TrainedModel wrap(ModelKind kind, int classes, int dim,
                  std::variant<LogRegModel, NaiveBayesModel, LinearSvcModel> params) {
    TrainedModel model;
    model.kind = kind;
    model.scheme = toy_scheme(classes);
    model.features.config.mode = FeatureMode::Tfidf;
    model.features.dim = dim;
    model.params = std::move(params);
    return model;
}

} // namespace

TEST_CASE("logreg loss at zero weights is ln K") {
    auto p = random_problem(12, 6, 4, 17);
    std::vector<double> w(4 * 6, 0.0), b(4, 0.0);
    double loss = logreg_loss_and_gradient(w, b, 4, p.x, p.y, 0.0, nullptr, nullptr);
    CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("logreg gradient matches finite differences") {
    const int classes = 5, dim = 10, samples = 8;
    auto p = random_problem(samples, dim, classes, 3);

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> init(-0.5, 0.5);
    std::vector<double> w(classes * dim), b(classes);
    for (auto& v : w) v = init(rng);
    for (auto& v : b) v = init(rng);

    const double lambda = 0.01;
    std::vector<double> gw, gb;
    logreg_loss_and_gradient(w, b, classes, p.x, p.y, lambda, &gw, &gb);
    REQUIRE(gw.size() == w.size());
    REQUIRE(gb.size() == b.size());

    const double eps = 1e-5;
    auto loss_at = [&](const std::vector<double>& wv, const std::vector<double>& bv) {
        return logreg_loss_and_gradient(wv, bv, classes, p.x, p.y, lambda, nullptr, nullptr);
    };

    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto hi = w, lo = w;
        hi[i] += eps;
        lo[i] -= eps;
        double numeric = (loss_at(hi, b) - loss_at(lo, b)) / (2 * eps);
        double denom = std::max({std::abs(numeric), std::abs(gw[i]), 1e-8});
        worst = std::max(worst, std::abs(numeric - gw[i]) / denom);
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        auto hi = b, lo = b;
        hi[i] += eps;
        lo[i] -= eps;
        double numeric = (loss_at(w, hi) - loss_at(w, lo)) / (2 * eps);
        double denom = std::max({std::abs(numeric), std::abs(gb[i]), 1e-8});
        worst = std::max(worst, std::abs(numeric - gb[i]) / denom);
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("logreg training lowers the loss below ln K and is deterministic") {
    auto p = separable_problem(6);
    LogRegHyperparams hp;
    hp.max_iters = 200;
    auto a = train_logreg(p.x, p.y, 3, hp);
    CHECK(a.final_loss < std::log(3.0));
    CHECK(a.iterations_run >= 1);
    CHECK(a.classes == 3);
    CHECK(a.dim == 4);

    auto b = train_logreg(p.x, p.y, 3, hp);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
    CHECK(a.final_loss == b.final_loss);
    CHECK(a.iterations_run == b.iterations_run);
}

TEST_CASE("logreg fits a separable toy problem") {
    auto p = separable_problem(8);
    LogRegHyperparams hp;
    hp.max_iters = 500;
    auto m = train_logreg(p.x, p.y, 3, hp);
    auto model = wrap(ModelKind::LogReg, 3, 4, m);
    auto predictions = predict(model, p.x);
    int correct = 0;
    for (std::size_t i = 0; i < p.y.size(); ++i) correct += predictions[i] == p.y[i];
    CHECK(correct == static_cast<int>(p.y.size()));
}

TEST_CASE("logreg input validation") {
    auto p = separable_problem(4);
    LogRegHyperparams hp;

    // Labels and rows must agree.
    auto short_y = p.y;
    short_y.pop_back();
    CHECK(kind_of([&] { train_logreg(p.x, short_y, 3, hp); }) == ErrorKind::DimensionMismatch);

    // A single distinct label cannot be fit.
    std::vector<int> ones(p.y.size(), 1);
    CHECK(kind_of([&] { train_logreg(p.x, ones, 3, hp); }) == ErrorKind::SingleClass);
    CHECK(kind_of([&] { train_logreg(p.x, p.y, 1, hp); }) == ErrorKind::SingleClass);

    // Labels outside [0, K).
    auto bad_y = p.y;
    bad_y[0] = 3;
    CHECK(kind_of([&] { train_logreg(p.x, bad_y, 3, hp); }) == ErrorKind::IndexOutOfRange);
    bad_y[0] = -1;
    CHECK(kind_of([&] { train_logreg(p.x, bad_y, 3, hp); }) == ErrorKind::IndexOutOfRange);

    // Empty matrix.
    FeatureMatrix empty;
    empty.cols = 4;
    CHECK(kind_of([&] { train_logreg(empty, {}, 3, hp); }) == ErrorKind::EmptyMatrix);
}

TEST_CASE("absurd learning rate raises NonFiniteLoss") {
    auto p = separable_problem(4);
    LogRegHyperparams hp;
    // Large enough that the L2 penalty overflows after one step.
    hp.learning_rate = 1e200;
    hp.max_iters = 50;
    CHECK(kind_of([&] { train_logreg(p.x, p.y, 3, hp); }) == ErrorKind::NonFiniteLoss);
}

TEST_CASE("ties break toward the lowest class index") {
    LogRegModel m;
    m.classes = 3;
    m.dim = 1;
    m.weights = {0.0, 0.0, 0.0};
    m.bias = {0.5, 0.5, -1.0};
    auto model = wrap(ModelKind::LogReg, 3, 1, m);
    CHECK(predict(model, sparse({})) == 0);

    // All-zero scores tie across every class.
    LogRegModel z;
    z.classes = 3;
    z.dim = 1;
    z.weights = {0.0, 0.0, 0.0};
    z.bias = {0.0, 0.0, 0.0};
    CHECK(predict(wrap(ModelKind::LogReg, 3, 1, z), sparse({{0, 2.0}})) == 0);
}

TEST_CASE("naive bayes matches the counting formulas on a hand example") {
    // Class 0: docs [2a], [1a 1b]; class 1: doc [3b]. V = 2, alpha = 1.
    auto x = matrix_of({sparse({{0, 2.0}}), sparse({{0, 1.0}, {1, 1.0}}), sparse({{1, 3.0}})}, 2);
    std::vector<int> y = {0, 0, 1};
    auto m = train_naive_bayes(x, y, 2, NaiveBayesHyperparams{});

    CHECK(m.log_prior[0] == doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-12));
    CHECK(m.log_prior[1] == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));

    // Class 0 totals: a=3, b=1, T=4. P(a|0) = (3+1)/(4+2) = 4/6.
    CHECK(m.log_likelihood[0] == doctest::Approx(std::log(4.0 / 6.0)).epsilon(1e-12));
    CHECK(m.log_likelihood[1] == doctest::Approx(std::log(2.0 / 6.0)).epsilon(1e-12));
    // Class 1 totals: a=0, b=3, T=3. P(a|1) = 1/5, P(b|1) = 4/5.
    CHECK(m.log_likelihood[2] == doctest::Approx(std::log(1.0 / 5.0)).epsilon(1e-12));
    CHECK(m.log_likelihood[3] == doctest::Approx(std::log(4.0 / 5.0)).epsilon(1e-12));

    // Scores are log prior plus count-weighted log likelihoods.
    auto model = wrap(ModelKind::NaiveBayes, 2, 2, m);
    auto scores = predict_scores(model, sparse({{0, 2.0}, {1, 1.0}}));
    CHECK(scores[0] == doctest::Approx(m.log_prior[0] + 2 * m.log_likelihood[0] +
                                       m.log_likelihood[1]).epsilon(1e-12));
    CHECK(scores[1] == doctest::Approx(m.log_prior[1] + 2 * m.log_likelihood[2] +
                                       m.log_likelihood[3]).epsilon(1e-12));
    CHECK(predict(model, sparse({{0, 2.0}, {1, 1.0}})) == 0);
    CHECK(predict(model, sparse({{1, 3.0}})) == 1);
}

TEST_CASE("naive bayes priors and likelihood rows are proper distributions") {
    auto p = random_problem(20, 7, 3, 55);
    // Make counts nonnegative integers.
    for (auto& row : p.x.row_data) {
        for (auto& [col, value] : row.entries) value = std::floor(std::abs(value) * 3);
    }
    auto m = train_naive_bayes(p.x, p.y, 3, NaiveBayesHyperparams{});

    double prior_sum = 0.0;
    for (double lp : m.log_prior) prior_sum += std::exp(lp);
    CHECK(prior_sum == doctest::Approx(1.0).epsilon(1e-12));

    for (int c = 0; c < 3; ++c) {
        double row_sum = 0.0;
        for (int t = 0; t < m.vocab_size; ++t) {
            row_sum += std::exp(m.log_likelihood[c * m.vocab_size + t]);
        }
        CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("naive bayes rejects bad inputs") {
    auto x = matrix_of({sparse({{0, 1.0}}), sparse({{1, -2.0}})}, 2);
    std::vector<int> y = {0, 1};
    CHECK(kind_of([&] { train_naive_bayes(x, y, 2, NaiveBayesHyperparams{}); }) ==
          ErrorKind::NegativeCount);

    auto ok = matrix_of({sparse({{0, 1.0}}), sparse({{1, 2.0}})}, 2);
    std::vector<int> partial = {0, 0};
    CHECK(kind_of([&] { train_naive_bayes(ok, partial, 2, NaiveBayesHyperparams{}); }) ==
          ErrorKind::SingleClass);

    std::vector<int> gap = {0, 2};
    CHECK(kind_of([&] { train_naive_bayes(ok, gap, 3, NaiveBayesHyperparams{}); }) ==
          ErrorKind::ClassTooSmall);

    NaiveBayesHyperparams bad;
    bad.alpha = 0.0;
    CHECK(kind_of([&] { train_naive_bayes(ok, y, 2, bad); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pegasos step decays without update when the margin holds") {
    std::vector<double> w = {1.0, 0.0};
    double b = 0.25;
    // eta = 1/(lambda t) = 1 at lambda 0.1, t 10; margin y(wx+b) = 3.25 >= 1.
    pegasos_step(w, b, sparse({{0, 3.0}}), +1, 0.1, 10);
    CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(w[1] == 0.0);
    CHECK(b == 0.25);
}

TEST_CASE("pegasos step decays then adds eta y x on violation") {
    // Decay-then-update: w = 1*(1 - 0.1) + 1*0.1 = 1.0 at eta 1.
    std::vector<double> w = {1.0};
    double b = 0.0;
    pegasos_step(w, b, sparse({{0, 0.1}}), +1, 0.1, 10);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b == doctest::Approx(1.0).epsilon(1e-15));

    // From zero weights the update is exactly eta y x.
    std::vector<double> w2 = {0.0};
    double b2 = 0.0;
    pegasos_step(w2, b2, sparse({{0, 2.0}}), -1, 0.1, 10);
    CHECK(w2[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(b2 == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("svc objective combines regularizer and mean hinge") {
    auto x = matrix_of({sparse({{0, 1.0}}), sparse({{0, 0.25}})}, 2);
    std::vector<int> y_pm = {+1, +1};
    std::vector<double> w = {2.0, 0.0};
    // Margins 2.0 and 0.5: hinge 0 and 0.5, mean 0.25; reg = 0.05*4 = 0.2.
    CHECK(svc_binary_objective(w, 0.0, x, y_pm, 0.1) == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("linear svc is deterministic per seed") {
    auto p = separable_problem(10);
    SvcHyperparams hp;
    hp.seed = 5;
    auto a = train_linear_svc(p.x, p.y, 3, hp);
    auto b = train_linear_svc(p.x, p.y, 3, hp);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);
}

TEST_CASE("linear svc separates an easy problem") {
    auto p = separable_problem(12);
    SvcHyperparams hp;
    hp.l2_lambda = 0.01;
    hp.epochs = 150;
    hp.seed = 1;
    auto m = train_linear_svc(p.x, p.y, 3, hp);
    auto model = wrap(ModelKind::LinearSvc, 3, 4, m);
    auto predictions = predict(model, p.x);
    int correct = 0;
    for (std::size_t i = 0; i < p.y.size(); ++i) correct += predictions[i] == p.y[i];
    CHECK(correct == static_cast<int>(p.y.size()));
}

TEST_CASE("predict_proba is softmax for logreg, normalized for nb, absent for svc") {
    auto p = separable_problem(6);

    LogRegHyperparams lr_hp;
    lr_hp.max_iters = 100;
    auto lr = wrap(ModelKind::LogReg, 3, 4, train_logreg(p.x, p.y, 3, lr_hp));
    auto probe = sparse({{0, 1.0}});
    auto proba = predict_proba(lr, probe);
    REQUIRE(proba.has_value());
    double sum = 0.0;
    for (double v : *proba) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    auto scores = predict_scores(lr, probe);
    // Softmax preserves the argmax.
    CHECK(static_cast<std::size_t>(std::max_element(proba->begin(), proba->end()) -
                                   proba->begin()) ==
          static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) -
                                   scores.begin()));

    auto counts = p.x;
    for (auto& row : counts.row_data) {
        for (auto& [col, value] : row.entries) value = std::ceil(std::abs(value));
    }
    auto nb = wrap(ModelKind::NaiveBayes, 3, 4,
                   train_naive_bayes(counts, p.y, 3, NaiveBayesHyperparams{}));
    auto nb_proba = predict_proba(nb, probe);
    REQUIRE(nb_proba.has_value());
    sum = 0.0;
    for (double v : *nb_proba) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));

    SvcHyperparams svc_hp;
    auto svc = wrap(ModelKind::LinearSvc, 3, 4, train_linear_svc(p.x, p.y, 3, svc_hp));
    CHECK_FALSE(predict_proba(svc, probe).has_value());
}

TEST_CASE("matrix predict equals per-row predict") {
    auto p = separable_problem(5);
    LogRegHyperparams hp;
    hp.max_iters = 60;
    auto model = wrap(ModelKind::LogReg, 3, 4, train_logreg(p.x, p.y, 3, hp));
    auto batch = predict(model, p.x);
    REQUIRE(batch.size() == p.x.rows);
    for (std::size_t i = 0; i < p.x.rows; ++i) {
        CHECK(batch[i] == predict(model, p.x.row_data[i]));
    }
}

TEST_CASE("out-of-dimension features are rejected at predict time") {
    LogRegModel m;
    m.classes = 2;
    m.dim = 3;
    m.weights.assign(6, 0.1);
    m.bias.assign(2, 0.0);
    auto model = wrap(ModelKind::LogReg, 2, 3, m);
    CHECK(kind_of([&] { predict_scores(model, sparse({{7, 1.0}})); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("model kind names round-trip") {
    for (ModelKind kind : {ModelKind::LogReg, ModelKind::NaiveBayes, ModelKind::LinearSvc}) {
        CHECK(parse_model_kind(to_string(kind)) == kind);
    }
    CHECK(kind_of([] { parse_model_kind("transformer"); }) == ErrorKind::InvalidArgument);
}
