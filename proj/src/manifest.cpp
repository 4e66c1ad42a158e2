// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/manifest.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <thread>

#include "guidedgen/bridge.hpp"
#include "guidedgen/ngram_lm.hpp"
#include "guidedgen/textual_guidance.hpp"
#include "guidedgen/toy_oracles.hpp"
#include "guidedgen/trace.hpp"

namespace guidedgen {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json source_entry(const std::string& path, bool with_hash) {
  if (path.empty()) return nullptr;
  json j = {{"path", path}};
  if (with_hash) j["fnv1a"] = file_fingerprint(path);
  return j;
}

std::string source_path(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return {};
  return j[key].at("path").get<std::string>();
}

}  // namespace

std::string file_fingerprint(const std::filesystem::path& path) {
  return to_hex(fnv1a(read_file(path)));
}

std::vector<double> read_vector_file(const std::filesystem::path& path) {
  std::vector<double> out;
  for (const auto& f : split_whitespace(read_file(path))) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || ptr != f.data() + f.size()) {
      throw ConfigError("control vector " + path.string() + ": unparsable float '" + f + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("control vector " + path.string() + " is empty");
  return out;
}

json OracleSpec::to_json(bool with_hashes) const {
  return {{"mode", bridge.empty() ? "toy" : "bridge"},
          {"corpus", source_entry(corpus, with_hashes)},
          {"vocab", source_entry(vocab, with_hashes)},
          {"emb", source_entry(emb, with_hashes)},
          {"mm_emb", source_entry(mm_emb, with_hashes)},
          {"order", order},
          {"smoothing", smoothing},
          {"bridge", bridge}};
}

OracleSpec OracleSpec::from_json(const json& j) {
  OracleSpec s;
  s.corpus = source_path(j, "corpus");
  s.vocab = source_path(j, "vocab");
  s.emb = source_path(j, "emb");
  s.mm_emb = source_path(j, "mm_emb");
  s.order = j.at("order").get<int>();
  s.smoothing = j.at("smoothing").get<double>();
  s.bridge = j.value("bridge", std::string());
  return s;
}

OracleBundle load_oracles(const OracleSpec& spec,
                          const std::vector<std::string>& extra_tokens) {
  OracleBundle b;
  Corpus corpus;
  try {
    if (!spec.corpus.empty()) corpus = read_corpus(spec.corpus);
    if (!spec.vocab.empty()) {
      std::vector<std::string> tokens;
      for (const auto& line : parse_corpus(read_file(spec.vocab))) {
        tokens.insert(tokens.end(), line.begin(), line.end());
      }
      b.vocab = std::make_shared<const Vocabulary>(std::move(tokens));
    } else if (!corpus.empty()) {
      b.vocab = std::make_shared<const Vocabulary>(vocabulary_from_corpus(corpus, extra_tokens));
    } else {
      throw ConfigError("no vocabulary source: pass --corpus or --vocab");
    }
    if (!spec.emb.empty()) {
      b.emb = std::make_shared<const EmbeddingTable>(load_embedding_table(spec.emb, *b.vocab));
      b.textual = std::make_shared<TableTextualOracle>(b.vocab, b.emb, "table");
    }
    if (!spec.mm_emb.empty()) {
      b.mm_emb = std::make_shared<const EmbeddingTable>(load_embedding_table(spec.mm_emb, *b.vocab));
    } else {
      b.mm_emb = b.emb;
    }
  } catch (const FormatError& e) {
    throw OracleError(e.what());
  }

  if (spec.bridge.empty()) {
    if (corpus.empty()) throw ConfigError("toy mode needs --corpus");
    if (!b.emb) throw ConfigError("toy mode needs --emb");
    std::shared_ptr<const NGramLM> ngram;
    try {
      ngram = std::make_shared<const NGramLM>(encode_corpus(corpus, *b.vocab), spec.order,
                                              spec.smoothing, b.vocab->size());
    } catch (const FormatError& e) {
      throw OracleError(e.what());
    }
    b.lm = std::make_shared<ToyBaseLM>(ngram, b.emb);
    b.multimodal = std::make_shared<ToyMultimodalOracle>(b.vocab, b.mm_emb);
  } else {
    auto client = BridgeClient::connect(spec.bridge);
    client->check_vocabulary(*b.vocab);
    b.lm = std::make_shared<BridgeLM>(client, b.vocab->size());
    b.multimodal = std::make_shared<BridgeMultimodalOracle>(client, b.vocab);
  }
  return b;
}

json RunManifest::to_json() const {
  json control_json = nullptr;
  if (const auto* v = std::get_if<std::vector<double>>(&control.payload)) {
    control_json = {{"vec", *v}};
  } else if (const auto* r = std::get_if<std::string>(&control.payload)) {
    control_json = {{"ref", *r}};
  }
  return {{"version", 1},
          {"config", serialize_config(config)},
          {"seed", config.seed},
          {"oracles", oracles.to_json(true)},
          {"prompts", prompts},
          {"keywords", keywords},
          {"control", control_json},
          {"output", output},
          {"trace", trace},
          {"sim_cache", sim_cache},
          {"jobs", jobs}};
}

RunManifest RunManifest::from_json(const json& j) {
  if (j.value("version", 0) != 1) throw ConfigError("unsupported manifest version");
  RunManifest m;
  m.config = parse_config(j.at("config").get<std::string>());
  m.oracles = OracleSpec::from_json(j.at("oracles"));
  m.prompts = j.at("prompts").get<std::vector<std::string>>();
  m.keywords = j.at("keywords").get<std::vector<std::string>>();
  const json& c = j.at("control");
  if (c.is_object() && c.contains("vec")) {
    m.control = VisualControl::from_vector(c["vec"].get<std::vector<double>>());
  } else if (c.is_object() && c.contains("ref")) {
    m.control = VisualControl::from_ref(c["ref"].get<std::string>());
  }
  m.output = j.value("output", std::string());
  m.trace = j.value("trace", std::string());
  m.sim_cache = j.value("sim_cache", std::string());
  m.jobs = j.value("jobs", 1);
  return m;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write manifest " + path.string());
  out << m.to_json().dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("manifest " + path.string() + " is not valid JSON");
  verify_manifest_sources(j);
  return RunManifest::from_json(j);
}

void verify_manifest_sources(const json& manifest_json) {
  const json& o = manifest_json.at("oracles");
  for (const char* key : {"corpus", "vocab", "emb", "mm_emb"}) {
    if (!o.contains(key) || o[key].is_null()) continue;
    const auto path = o[key].at("path").get<std::string>();
    if (!o[key].contains("fnv1a")) continue;
    if (file_fingerprint(path) != o[key]["fnv1a"].get<std::string>()) {
      throw ConfigError(std::string("manifest source '") + key + "' (" + path +
                        ") changed since the run was recorded");
    }
  }
}

RunOutput execute_run(const RunManifest& m) {
  std::vector<std::string> extra;
  if (!m.config.eos_token.empty()) extra.push_back(m.config.eos_token);
  if (!m.config.bos_token.empty()) extra.push_back(m.config.bos_token);
  const OracleBundle bundle = load_oracles(m.oracles, extra);
  const Vocabulary& vocab = *bundle.vocab;

  TextualControl tctl{m.keywords};
  const DecoderConfig cfg = validate_config(m.config, vocab, tctl);

  std::vector<std::vector<TokenId>> prompts;
  for (const auto& p : m.prompts) prompts.push_back(vocab.encode(p));
  if (prompts.empty()) prompts.emplace_back();

  std::shared_ptr<const SimilarityMatrix> sim;
  if (tctl.enabled()) {
    if (!bundle.textual) throw ConfigError("keywords given but no --emb table");
    for (const auto& kw : tctl.keywords) {
      if (!bundle.textual->can_embed(kw)) {
        throw OracleError("textual oracle: no embedding for keyword '" + kw + "'");
      }
    }
    if (!m.sim_cache.empty()) {
      const auto key = similarity_key_hash(vocab, tctl, *bundle.textual, cfg.floor_similarity);
      if (std::filesystem::exists(m.sim_cache)) {
        sim = std::make_shared<const SimilarityMatrix>(read_similarity_cache(m.sim_cache, key));
      } else {
        auto built = build_similarity_matrix(vocab, tctl, *bundle.textual, cfg.floor_similarity);
        write_similarity_cache(m.sim_cache, built, key);
        sim = std::make_shared<const SimilarityMatrix>(std::move(built));
      }
    }
  }

  RunOutput out;
  out.results.resize(prompts.size());
  std::vector<std::exception_ptr> errors(prompts.size());
  auto run_one = [&](std::size_t i) {
    try {
      GuidedDecoder decoder(cfg, vocab, bundle.view(), tctl, m.control, sim);
      out.results[i] = decoder.generate(prompts[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t jobs = static_cast<std::size_t>(std::max(1, m.jobs));
  if (jobs == 1 || prompts.size() == 1) {
    for (std::size_t i = 0; i < prompts.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(jobs, prompts.size()); ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < prompts.size(); i += jobs) run_one(i);
      });
    }
    for (auto& t : workers) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::ostringstream text;
  std::ostringstream trace;
  for (std::size_t i = 0; i < out.results.size(); ++i) {
    text << vocab.decode(out.results[i].tokens) << '\n';
    write_trace_jsonl(trace, out.results[i].trace, vocab, i);
  }
  out.text = text.str();
  out.trace_jsonl = trace.str();
  return out;
}

}  // namespace guidedgen
