#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bloomclf/errors.hpp"
#include "bloomclf/models.hpp"
#include "bloomclf/version.hpp"

namespace bloomclf {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void corrupt(const std::string& detail) {
    raise(ErrorKind::CorruptFile, detail);
}

void check_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            raise(ErrorKind::InvalidArgument,
                  std::string("model has a non-finite value in ") + what);
        }
    }
}

ojson matrix_json(const std::vector<double>& flat, int rows, int cols) {
    ojson out = ojson::array();
    for (int r = 0; r < rows; ++r) {
        ojson row = ojson::array();
        for (int c = 0; c < cols; ++c) {
            row.push_back(flat[static_cast<std::size_t>(r) * cols + c]);
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<double> matrix_from_json(const ojson& j, int rows, int cols,
                                     const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows) {
        corrupt(std::string(what) + ": expected " + std::to_string(rows) + " rows");
    }
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(rows) * cols);
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != cols) {
            corrupt(std::string(what) + ": expected " + std::to_string(cols) +
                    " columns per row");
        }
        for (const auto& v : row) {
            if (!v.is_number()) corrupt(std::string(what) + ": non-numeric entry");
            flat.push_back(v.get<double>());
        }
    }
    return flat;
}

std::vector<double> vector_from_json(const ojson& j, int len, const char* what) {
    if (!j.is_array() || static_cast<int>(j.size()) != len) {
        corrupt(std::string(what) + ": expected " + std::to_string(len) + " entries");
    }
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(len));
    for (const auto& v : j) {
        if (!v.is_number()) corrupt(std::string(what) + ": non-numeric entry");
        out.push_back(v.get<double>());
    }
    return out;
}

const ojson& require(const ojson& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) corrupt(std::string("missing field \"") + key + "\"");
    return *it;
}

ojson scheme_json(const LabelScheme& scheme) {
    ojson j;
    j["name"] = scheme.name;
    j["class_names"] = scheme.class_names;
    j["level_to_class"] = scheme.level_to_class;
    return j;
}

LabelScheme scheme_from_json(const ojson& j) {
    LabelScheme scheme;
    scheme.name = require(j, "name").get<std::string>();
    const ojson& names = require(j, "class_names");
    if (!names.is_array() || names.empty()) corrupt("scheme: class_names must be a non-empty array");
    for (const auto& n : names) scheme.class_names.push_back(n.get<std::string>());
    const ojson& map = require(j, "level_to_class");
    if (!map.is_array() || map.size() != static_cast<std::size_t>(kBloomLevelCount)) {
        corrupt("scheme: level_to_class must have six entries");
    }
    for (std::size_t i = 0; i < static_cast<std::size_t>(kBloomLevelCount); ++i) {
        int c = map[i].get<int>();
        if (c < 0 || c >= scheme.class_count()) corrupt("scheme: class index out of range");
        scheme.level_to_class[i] = c;
    }
    return scheme;
}

ojson features_json(const FittedFeatures& f) {
    ojson j;
    j["mode"] = to_string(f.config.mode);
    j["sublinear_tf"] = f.config.sublinear_tf;
    j["min_df"] = f.config.min_df;
    j["metric_scaling"] = to_string(f.config.metric_scaling);
    j["dim"] = f.dim;
    ojson vocab;
    vocab["document_count"] = f.vocab.document_count;
    ojson terms = ojson::array();
    for (int i = 0; i < f.vocab.size(); ++i) {
        terms.push_back(ojson::array({f.vocab.terms[i], i, f.vocab.document_frequency[i]}));
    }
    vocab["terms"] = std::move(terms);
    j["vocabulary"] = std::move(vocab);
    if (f.scaler) {
        ojson s;
        s["mean"] = f.scaler->mean;
        s["stddev"] = f.scaler->stddev;
        j["metric_scaler"] = std::move(s);
    } else {
        j["metric_scaler"] = nullptr;
    }
    return j;
}

FittedFeatures features_from_json(const ojson& j) {
    FittedFeatures f;
    auto mode = parse_feature_mode(require(j, "mode").get<std::string>());
    if (!mode) corrupt("features: unknown mode");
    f.config.mode = *mode;
    f.config.sublinear_tf = require(j, "sublinear_tf").get<bool>();
    f.config.min_df = require(j, "min_df").get<int>();
    auto scaling = parse_metric_scaling(require(j, "metric_scaling").get<std::string>());
    if (!scaling) corrupt("features: unknown metric_scaling");
    f.config.metric_scaling = *scaling;
    f.dim = require(j, "dim").get<int>();

    const ojson& vocab = require(j, "vocabulary");
    f.vocab.document_count = require(vocab, "document_count").get<int>();
    const ojson& terms = require(vocab, "terms");
    if (!terms.is_array()) corrupt("features: vocabulary terms must be an array");
    int expected_index = 0;
    for (const auto& entry : terms) {
        if (!entry.is_array() || entry.size() != 3) {
            corrupt("features: each vocabulary entry must be [term, index, df]");
        }
        if (entry[1].get<int>() != expected_index) {
            corrupt("features: vocabulary indices must be dense and ascending");
        }
        f.vocab.terms.push_back(entry[0].get<std::string>());
        int df = entry[2].get<int>();
        if (df < 0) corrupt("features: negative document frequency");
        f.vocab.document_frequency.push_back(df);
        ++expected_index;
    }
    f.vocab.rebuild_index();

    const ojson& scaler = require(j, "metric_scaler");
    if (!scaler.is_null()) {
        MetricScaler s;
        const ojson& mean = require(scaler, "mean");
        const ojson& stddev = require(scaler, "stddev");
        if (!mean.is_array() || mean.size() != 4 || !stddev.is_array() || stddev.size() != 4) {
            corrupt("features: metric scaler needs four means and four stddevs");
        }
        for (std::size_t i = 0; i < 4; ++i) {
            s.mean[i] = mean[i].get<double>();
            s.stddev[i] = stddev[i].get<double>();
        }
        f.scaler = s;
    }
    return f;
}

ojson params_json(const TrainedModel& model) {
    ojson j;
    if (const auto* lr = std::get_if<LogRegModel>(&model.params)) {
        j["classes"] = lr->classes;
        j["dim"] = lr->dim;
        j["l2_lambda"] = lr->hyperparams.l2_lambda;
        j["learning_rate"] = lr->hyperparams.learning_rate;
        j["max_iters"] = lr->hyperparams.max_iters;
        j["tol"] = lr->hyperparams.tol;
        j["seed"] = lr->hyperparams.seed;
        j["iterations_run"] = lr->iterations_run;
        j["final_loss"] = lr->final_loss;
        j["bias"] = lr->bias;
        j["weights"] = matrix_json(lr->weights, lr->classes, lr->dim);
    } else if (const auto* nb = std::get_if<NaiveBayesModel>(&model.params)) {
        j["classes"] = nb->classes;
        j["vocab_size"] = nb->vocab_size;
        j["alpha"] = nb->hyperparams.alpha;
        j["log_prior"] = nb->log_prior;
        j["log_likelihood"] = matrix_json(nb->log_likelihood, nb->classes, nb->vocab_size);
    } else {
        const auto& svc = std::get<LinearSvcModel>(model.params);
        j["classes"] = svc.classes;
        j["dim"] = svc.dim;
        j["l2_lambda"] = svc.hyperparams.l2_lambda;
        j["epochs"] = svc.hyperparams.epochs;
        j["seed"] = svc.hyperparams.seed;
        j["bias"] = svc.bias;
        j["weights"] = matrix_json(svc.weights, svc.classes, svc.dim);
    }
    return j;
}

void params_from_json(const ojson& j, TrainedModel& model) {
    int classes = require(j, "classes").get<int>();
    if (classes != model.scheme.class_count()) {
        corrupt("params: class count does not match the label scheme");
    }
    auto check_dim = [&](int dim) {
        if (dim != model.features.dim) {
            corrupt("params: dimension does not match the fitted features");
        }
    };
    switch (model.kind) {
        case ModelKind::LogReg: {
            LogRegModel lr;
            lr.classes = classes;
            lr.dim = require(j, "dim").get<int>();
            check_dim(lr.dim);
            lr.hyperparams.l2_lambda = require(j, "l2_lambda").get<double>();
            lr.hyperparams.learning_rate = require(j, "learning_rate").get<double>();
            lr.hyperparams.max_iters = require(j, "max_iters").get<int>();
            lr.hyperparams.tol = require(j, "tol").get<double>();
            lr.hyperparams.seed = require(j, "seed").get<std::uint64_t>();
            lr.iterations_run = require(j, "iterations_run").get<int>();
            lr.final_loss = require(j, "final_loss").get<double>();
            lr.bias = vector_from_json(require(j, "bias"), classes, "bias");
            lr.weights = matrix_from_json(require(j, "weights"), classes, lr.dim, "weights");
            model.params = std::move(lr);
            break;
        }
        case ModelKind::NaiveBayes: {
            NaiveBayesModel nb;
            nb.classes = classes;
            nb.vocab_size = require(j, "vocab_size").get<int>();
            check_dim(nb.vocab_size);
            nb.hyperparams.alpha = require(j, "alpha").get<double>();
            nb.log_prior = vector_from_json(require(j, "log_prior"), classes, "log_prior");
            nb.log_likelihood = matrix_from_json(require(j, "log_likelihood"), classes,
                                                 nb.vocab_size, "log_likelihood");
            model.params = std::move(nb);
            break;
        }
        case ModelKind::LinearSvc: {
            LinearSvcModel svc;
            svc.classes = classes;
            svc.dim = require(j, "dim").get<int>();
            check_dim(svc.dim);
            svc.hyperparams.l2_lambda = require(j, "l2_lambda").get<double>();
            svc.hyperparams.epochs = require(j, "epochs").get<int>();
            svc.hyperparams.seed = require(j, "seed").get<std::uint64_t>();
            svc.bias = vector_from_json(require(j, "bias"), classes, "bias");
            svc.weights = matrix_from_json(require(j, "weights"), classes, svc.dim, "weights");
            model.params = std::move(svc);
            break;
        }
    }
}

}  // namespace

std::string model_to_json(const TrainedModel& model) {
    if (const auto* lr = std::get_if<LogRegModel>(&model.params)) {
        check_finite(lr->weights, "weights");
        check_finite(lr->bias, "bias");
    } else if (const auto* nb = std::get_if<NaiveBayesModel>(&model.params)) {
        check_finite(nb->log_prior, "log_prior");
        check_finite(nb->log_likelihood, "log_likelihood");
    } else {
        const auto& svc = std::get<LinearSvcModel>(model.params);
        check_finite(svc.weights, "weights");
        check_finite(svc.bias, "bias");
    }

    ojson j;
    j["format_version"] = kModelFormatVersion;
    j["tool_version"] = kVersion;
    j["kind"] = to_string(model.kind);
    j["scheme"] = scheme_json(model.scheme);
    j["features"] = features_json(model.features);
    j["params"] = params_json(model);
    return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        corrupt("not valid JSON at byte " + std::to_string(e.byte) + " (" + e.what() + ")");
    }
    if (!j.is_object()) corrupt("top level is not a JSON object");

    try {
        const ojson& version = require(j, "format_version");
        if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
            raise(ErrorKind::VersionMismatch,
                  "model file has format_version " + version.dump() + ", this build reads " +
                      std::to_string(kModelFormatVersion));
        }
        TrainedModel model;
        model.kind = parse_model_kind(require(j, "kind").get<std::string>());
        model.scheme = scheme_from_json(require(j, "scheme"));
        model.features = features_from_json(require(j, "features"));
        params_from_json(require(j, "params"), model);
        return model;
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        corrupt(std::string("malformed field (") + e.what() + ")");
    }
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::IoError, "cannot open " + path + " for writing");
    out << model_to_json(model);
    if (!out) raise(ErrorKind::IoError, "failed writing " + path);
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return model_from_json(buffer.str());
}

}  // namespace bloomclf
