#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bloomclf/datagen.hpp"
#include "bloomclf/dataset.hpp"
#include "bloomclf/errors.hpp"
#include "bloomclf/eval.hpp"
#include "bloomclf/models.hpp"
#include "bloomclf/pipeline.hpp"
#include "bloomclf/textmetrics.hpp"
#include "bloomclf/version.hpp"

namespace py = pybind11;

namespace {

py::dict metrics_dict(const bloomclf::TextMetrics& m) {
    py::dict d;
    d["length_l"] = m.length_l;
    d["fkgl"] = m.fkgl;
    d["ttr"] = m.ttr;
    d["ld"] = m.ld;
    return d;
}

py::dict record_dict(const bloomclf::QuestionRecord& rec) {
    py::dict d;
    d["text"] = rec.text;
    d["label"] = bloomclf::to_string(rec.level);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Question complexity metrics and Bloom-level classifiers";
    m.attr("__version__") = bloomclf::kVersion;

    py::register_exception<bloomclf::Error>(m, "BloomclfError");

    m.def("compute_metrics",
          [](const std::string& text) { return metrics_dict(bloomclf::compute_metrics(text)); },
          py::arg("text"), "The four metrics (L, FKGL, TTR, LD) for one question");

    m.def("tokenize",
          [](const std::string& text) {
              bloomclf::TokenizedText t = bloomclf::tokenize(text);
              py::dict d;
              d["tokens"] = t.tokens;
              d["sentence_count"] = t.sentence_count;
              d["syllable_counts"] = t.syllable_counts;
              d["content_flags"] = t.content_flags;
              return d;
          },
          py::arg("text"));

    m.def("count_syllables",
          [](const std::string& word) { return bloomclf::count_syllables(word); },
          py::arg("word"));

    m.def("is_content_word",
          [](const std::string& word) { return bloomclf::is_content_word(word); },
          py::arg("word"));

    m.def("generate",
          [](int n_per_level, std::uint64_t seed) {
              bloomclf::GenerationResult out =
                  bloomclf::generate(n_per_level, seed, bloomclf::default_banks());
              py::list records;
              for (const auto& rec : out.records) records.append(record_dict(rec));
              py::dict d;
              d["records"] = records;
              d["space_exhausted"] = out.space_exhausted;
              return d;
          },
          py::arg("n_per_level"), py::arg("seed") = 0,
          "Synthetic labeled questions from the embedded verb/template banks");

    m.def("load_corpus",
          [](const std::string& path) {
              py::list records;
              for (const auto& rec : bloomclf::load_corpus(path)) {
                  records.append(record_dict(rec));
              }
              return records;
          },
          py::arg("path"));

    m.def("class_distribution",
          [](const std::string& path) {
              auto counts = bloomclf::class_distribution(bloomclf::load_corpus(path));
              py::dict d;
              for (bloomclf::BloomLevel level : bloomclf::all_bloom_levels()) {
                  d[bloomclf::to_string(level)] = counts[static_cast<std::size_t>(level)];
              }
              return d;
          },
          py::arg("path"));

    m.def("run_experiment_json",
          [](const std::string& name, const std::string& corpus_path, std::uint64_t seed,
             const std::string& out_dir) {
              bloomclf::ExperimentOptions opt = bloomclf::experiment_preset(name);
              opt.corpus_path = corpus_path;
              opt.seed = seed;
              bloomclf::ExperimentResult result = bloomclf::run_experiment(opt);
              if (!out_dir.empty()) bloomclf::write_artifacts(result, out_dir);
              return bloomclf::report_json_document(result);
          },
          py::arg("name"), py::arg("corpus_path"), py::arg("seed") = 0,
          py::arg("out_dir") = std::string(),
          "Run an experiment preset; returns the structured report as a JSON string");

    m.def("predict",
          [](const std::string& model_path, const std::vector<std::string>& texts) {
              bloomclf::TrainedModel model = bloomclf::load_model(model_path);
              std::vector<std::string> out;
              out.reserve(texts.size());
              for (const std::string& text : texts) {
                  int c = bloomclf::predict_text(model, text);
                  out.push_back(model.scheme.class_names[static_cast<std::size_t>(c)]);
              }
              return out;
          },
          py::arg("model_path"), py::arg("texts"),
          "Predicted class names, in input order");
}
