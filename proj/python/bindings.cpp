// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "guidedgen/cli.hpp"
#include "guidedgen/config.hpp"
#include "guidedgen/decoder.hpp"
#include "guidedgen/dynamic_weighting.hpp"
#include "guidedgen/manifest.hpp"
#include "guidedgen/metrics.hpp"
#include "guidedgen/ngram_lm.hpp"
#include "guidedgen/textual_guidance.hpp"
#include "guidedgen/toy_oracles.hpp"
#include "guidedgen/trace.hpp"
#include "guidedgen/vector_math.hpp"
#include "guidedgen/visual_guidance.hpp"

#include <sstream>

namespace py = pybind11;
using namespace guidedgen;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

// Toy oracles built from in-memory corpus and embedding text.
OracleBundle toy_bundle(const std::string& corpus_text, const std::string& emb_text,
                        const std::string& mm_emb_text, int order, double smoothing,
                        const std::vector<std::string>& extra_tokens) {
  OracleBundle b;
  const Corpus corpus = parse_corpus(corpus_text);
  b.vocab = std::make_shared<const Vocabulary>(vocabulary_from_corpus(corpus, extra_tokens));
  b.emb = std::make_shared<const EmbeddingTable>(parse_embedding_table(emb_text, *b.vocab));
  b.mm_emb = mm_emb_text.empty()
                 ? b.emb
                 : std::make_shared<const EmbeddingTable>(
                       parse_embedding_table(mm_emb_text, *b.vocab));
  auto ngram = std::make_shared<const NGramLM>(encode_corpus(corpus, *b.vocab), order,
                                               smoothing, b.vocab->size());
  b.lm = std::make_shared<ToyBaseLM>(ngram, b.emb);
  b.textual = std::make_shared<TableTextualOracle>(b.vocab, b.emb);
  b.multimodal = std::make_shared<ToyMultimodalOracle>(b.vocab, b.mm_emb);
  return b;
}

VisualControl make_control(const std::optional<std::vector<double>>& vec,
                           const std::optional<std::string>& ref) {
  if (vec && ref) throw ConfigError("pass control_vec or control_ref, not both");
  if (vec) return VisualControl::from_vector(*vec);
  if (ref) return VisualControl::from_ref(*ref);
  return {};
}

py::dict generate_py(const OracleBundle& b, const std::string& prompt,
                     const std::vector<std::string>& keywords,
                     const std::optional<std::vector<double>>& control_vec,
                     const std::optional<std::string>& control_ref,
                     const DecoderConfig& cfg) {
  const std::vector<TokenId> ids = b.vocab->encode(prompt);
  GenerationResult r;
  {
    py::gil_scoped_release release;
    r = generate(ids, TextualControl{keywords}, make_control(control_vec, control_ref), cfg,
                 *b.vocab, b.view());
  }
  py::list tokens;
  for (TokenId t : r.tokens) tokens.append(b.vocab->token(t));
  py::list trace;
  for (const auto& step : r.trace) trace.append(to_python(step_trace_to_json(step, *b.vocab)));
  py::dict out;
  out["tokens"] = tokens;
  out["token_ids"] = r.tokens;
  out["text"] = b.vocab->decode(r.tokens);
  out["stopped_at_eos"] = r.stopped_at_eos;
  out["trace"] = trace;
  return out;
}

SimilarityMatrix matrix_from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != cols) throw ConfigError("similarity rows differ in length");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return SimilarityMatrix(rows.size(), cols, std::move(flat));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Guided decoding with keyword and control-embedding steering.";
  m.attr("__version__") = GUIDEDGEN_VERSION;

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<OracleError>(m, "OracleError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());

  py::class_<Vocabulary, std::shared_ptr<Vocabulary>>(m, "Vocabulary")
      .def(py::init<std::vector<std::string>>(), py::arg("tokens"))
      .def("__len__", &Vocabulary::size)
      .def_property_readonly("tokens", &Vocabulary::tokens)
      .def("token", &Vocabulary::token)
      .def("id_of", &Vocabulary::id_of)
      .def("__contains__", [](const Vocabulary& v, const std::string& t) { return v.contains(t); })
      .def("encode", &Vocabulary::encode)
      .def("decode", &Vocabulary::decode)
      .def_property_readonly("hash_hex", &Vocabulary::hash_hex);

  py::enum_<SelectionMode>(m, "SelectionMode")
      .value("SR", SelectionMode::kStepwiseRandom)
      .value("MP", SelectionMode::kMeanPooling)
      .value("WM", SelectionMode::kWordwiseMax);

  py::class_<DecoderConfig>(m, "DecoderConfig")
      .def(py::init<>())
      .def_readwrite("k", &DecoderConfig::k)
      .def_readwrite("eta", &DecoderConfig::eta)
      .def_readwrite("lambda_", &DecoderConfig::lambda)
      .def_readwrite("alpha_max", &DecoderConfig::alpha_max)
      .def_readwrite("beta_max", &DecoderConfig::beta_max)
      .def_readwrite("n_hat", &DecoderConfig::n_hat)
      .def_readwrite("selection", &DecoderConfig::selection)
      .def_readwrite("max_len", &DecoderConfig::max_len)
      .def_readwrite("seed", &DecoderConfig::seed)
      .def_readwrite("eos_token", &DecoderConfig::eos_token)
      .def_readwrite("bos_token", &DecoderConfig::bos_token)
      .def_readwrite("dynamic_alpha", &DecoderConfig::dynamic_alpha)
      .def_readwrite("dynamic_beta", &DecoderConfig::dynamic_beta)
      .def_readwrite("alpha", &DecoderConfig::alpha)
      .def_readwrite("beta", &DecoderConfig::beta)
      .def_readwrite("beta_double_apply", &DecoderConfig::beta_double_apply)
      .def_readwrite("allow_negative_weights", &DecoderConfig::allow_negative_weights)
      .def_readwrite("floor_similarity", &DecoderConfig::floor_similarity)
      .def("set", [](DecoderConfig& c, const std::string& key, const std::string& value) {
        set_config_field(c, key, value);
      })
      .def("serialize", [](const DecoderConfig& c) { return serialize_config(c); })
      .def_static("parse", [](const std::string& text) { return parse_config(text); })
      .def("__eq__", [](const DecoderConfig& a, const DecoderConfig& b) { return a == b; })
      .def("__repr__", [](const DecoderConfig& c) {
        return "<DecoderConfig k=" + std::to_string(c.k) + " selection=" +
               std::string(to_string(c.selection)) + ">";
      });

  m.def("preset_names", &preset_names);
  m.def("load_preset", [](const std::string& name) { return load_preset(name); });

  py::class_<OracleBundle>(m, "ToyOracles")
      .def_static("from_text", &toy_bundle, py::arg("corpus"), py::arg("embeddings"),
                  py::arg("mm_embeddings") = "", py::arg("order") = 2,
                  py::arg("smoothing") = 0.5, py::arg("extra_tokens") = std::vector<std::string>{})
      .def_static(
          "from_files",
          [](const std::string& corpus, const std::string& emb, const std::string& mm_emb,
             int order, double smoothing, const std::vector<std::string>& extra) {
            OracleSpec spec;
            spec.corpus = corpus;
            spec.emb = emb;
            spec.mm_emb = mm_emb;
            spec.order = order;
            spec.smoothing = smoothing;
            return load_oracles(spec, extra);
          },
          py::arg("corpus"), py::arg("embeddings"), py::arg("mm_embeddings") = "",
          py::arg("order") = 2, py::arg("smoothing") = 0.5,
          py::arg("extra_tokens") = std::vector<std::string>{})
      .def_property_readonly("vocabulary", [](const OracleBundle& b) { return *b.vocab; })
      .def("next_distribution",
           [](const OracleBundle& b, const std::string& prefix) {
             const auto ids = b.vocab->encode(prefix);
             return b.lm->next_distribution(ids);
           })
      .def("embed_text",
           [](const OracleBundle& b, const std::string& text) {
             const auto ids = b.vocab->encode(text);
             return b.multimodal->embed_text(ids);
           })
      .def("similarity_matrix",
           [](const OracleBundle& b, const std::vector<std::string>& keywords, bool floor) {
             const auto sm = build_similarity_matrix(*b.vocab, TextualControl{keywords},
                                                     *b.textual, floor);
             std::vector<std::vector<double>> rows;
             for (std::size_t n = 0; n < sm.rows(); ++n) {
               auto r = sm.row(n);
               rows.emplace_back(r.begin(), r.end());
             }
             return rows;
           },
           py::arg("keywords"), py::arg("floor_negative") = false)
      .def("evaluate",
           [](const OracleBundle& b, const std::vector<std::string>& lines,
              const std::vector<std::string>& keywords,
              const std::optional<std::vector<double>>& control_vec,
              const std::optional<std::string>& control_ref) {
             std::vector<std::vector<TokenId>> seqs;
             for (const auto& l : lines) seqs.push_back(b.vocab->encode(l));
             std::vector<double> control;
             const VisualControl vctl = make_control(control_vec, control_ref);
             if (!vctl.empty()) control = b.multimodal->embed_control(vctl);
             return to_python(
                 evaluate(seqs, *b.vocab, keywords, *b.lm, b.multimodal.get(), control).to_json());
           },
           py::arg("lines"), py::arg("keywords") = std::vector<std::string>{},
           py::arg("control_vec") = std::nullopt, py::arg("control_ref") = std::nullopt);

  m.def("generate", &generate_py, py::arg("oracles"), py::arg("prompt"),
        py::arg("keywords") = std::vector<std::string>{}, py::arg("control_vec") = std::nullopt,
        py::arg("control_ref") = std::nullopt, py::arg("config") = DecoderConfig{},
        "Runs one guided session; returns tokens, text and the per-step trace.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");

  // Step-level operations.
  m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) {
    return cosine(a, b);
  });
  m.def(
      "select_control",
      [](const std::vector<std::vector<double>>& rows, SelectionMode mode, std::uint64_t seed) {
        Rng rng(seed);
        ControlVector c = select_control(matrix_from_rows(rows), mode, rng);
        return py::make_tuple(c.values, c.sampled_row);
      },
      py::arg("matrix"), py::arg("mode"), py::arg("seed") = 0);
  m.def("shift_distribution",
        [](const std::vector<double>& p, const std::vector<double>& c, double alpha) {
          return shift_distribution(p, c, alpha);
        });
  m.def("candidate_set", [](const std::vector<double>& scores, int k) {
    return candidate_set(scores, k).token_ids;
  });
  m.def("softmax", [](const std::vector<double>& x) { return softmax(x); });
  m.def("dynamic_weight", &dynamic_weight, py::arg("signal"), py::arg("lambda_"),
        py::arg("upper"), py::arg("allow_negative") = false);
  m.def(
      "compute_alpha",
      [](const std::vector<double>& p, const std::vector<TokenId>& ids, int n_hat, double lambda,
         double alpha_max, bool allow_negative) {
        const WeightResult w = compute_alpha(p, ids, n_hat, lambda, alpha_max, allow_negative);
        return py::make_tuple(w.signal, w.weight);
      },
      py::arg("p_lm"), py::arg("keyword_ids"), py::arg("n_hat"), py::arg("lambda_"),
      py::arg("alpha_max"), py::arg("allow_negative") = false);
  m.def(
      "compute_beta",
      [](const std::vector<double>& sims, double lambda, double beta_max, bool allow_negative) {
        const WeightResult w = compute_beta_from_similarities(sims, lambda, beta_max, allow_negative);
        return py::make_tuple(w.signal, w.weight);
      },
      py::arg("similarities"), py::arg("lambda_"), py::arg("beta_max"),
      py::arg("allow_negative") = false);
  m.def("simctg_score", &simctg_score);

  m.def("distinct_n", [](const std::vector<TokenId>& ids, int n) { return distinct_n(ids, n); });
  m.def("keyword_hit_rate",
        [](const std::vector<std::string>& tokens, const std::vector<std::string>& keywords) {
          return keyword_hit_rate(tokens, keywords);
        });
}
