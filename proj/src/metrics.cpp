// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "guidedgen/vector_math.hpp"

namespace guidedgen {

double distinct_n(std::span<const TokenId> tokens, int n) {
  if (n < 1) throw Error("distinct_n: n must be >= 1");
  if (tokens.size() < static_cast<std::size_t>(n)) return 0.0;
  const std::size_t total = tokens.size() - static_cast<std::size_t>(n) + 1;
  std::set<std::vector<TokenId>> unique;
  for (std::size_t i = 0; i < total; ++i) {
    unique.emplace(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i) + n);
  }
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

double control_similarity(std::span<const TokenId> tokens,
                          std::span<const double> control_embedding,
                          const MultimodalOracle& oracle) {
  if (tokens.empty()) throw OracleError("control_similarity: empty sequence");
  return cosine(oracle.embed_text(tokens), control_embedding);
}

double keyword_hit_rate(std::span<const std::string> tokens,
                        std::span<const std::string> keywords) {
  if (keywords.empty()) return 0.0;
  std::unordered_set<std::string_view> present(tokens.begin(), tokens.end());
  std::size_t hits = 0;
  for (const auto& kw : keywords) hits += present.count(kw);
  return static_cast<double>(hits) / static_cast<double>(keywords.size());
}

double perplexity(std::span<const TokenId> tokens, const BaseLM& lm,
                  std::span<const TokenId> context) {
  if (tokens.empty()) throw Error("perplexity: empty sequence");
  std::vector<TokenId> prefix(context.begin(), context.end());
  double nll = 0.0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto p = lm.next_distribution(prefix);
    const auto id = static_cast<std::size_t>(tokens[t]);
    if (id >= p.size()) throw Error("perplexity: token id out of range");
    if (!(p[id] > 0.0)) {
      throw OracleError("perplexity: zero-probability token at position " +
                        std::to_string(t));
    }
    nll -= std::log(p[id]);
    prefix.push_back(tokens[t]);
  }
  return std::exp(nll / static_cast<double>(tokens.size()));
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["distinct_2"] = distinct_2;
  j["distinct_4"] = distinct_4;
  j["control_sim"] = control_sim ? nlohmann::json(*control_sim) : nlohmann::json(nullptr);
  j["keyword_hit_rate"] = keyword_hit_rate;
  j["ppl"] = ppl;
  j["sequences"] = sequences;
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.distinct_2 = j.at("distinct_2").get<double>();
  r.distinct_4 = j.at("distinct_4").get<double>();
  if (!j.at("control_sim").is_null()) r.control_sim = j.at("control_sim").get<double>();
  r.keyword_hit_rate = j.at("keyword_hit_rate").get<double>();
  r.ppl = j.at("ppl").get<double>();
  r.sequences = j.at("sequences").get<std::size_t>();
  return r;
}

std::string EvalReport::to_table() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%-18s %10zu\n%-18s %10.6f\n%-18s %10.6f\n%-18s %10s\n"
                "%-18s %10.6f\n%-18s %10.6f\n",
                "sequences", sequences, "distinct_2", distinct_2, "distinct_4",
                distinct_4, "control_sim",
                control_sim ? std::to_string(*control_sim).c_str() : "n/a",
                "keyword_hit_rate", keyword_hit_rate, "ppl", ppl);
  return buf;
}

EvalReport evaluate(const std::vector<std::vector<TokenId>>& sequences,
                    const Vocabulary& vocab, const std::vector<std::string>& keywords,
                    const BaseLM& lm, const MultimodalOracle* multimodal,
                    std::span<const double> control_embedding) {
  if (sequences.empty()) throw Error("evaluate: no sequences");
  EvalReport r;
  r.sequences = sequences.size();
  const bool with_control = multimodal && !control_embedding.empty();
  double csim = 0.0;
  for (const auto& seq : sequences) {
    if (seq.empty()) throw Error("evaluate: empty sequence");
    r.distinct_2 += distinct_n(seq, 2);
    r.distinct_4 += distinct_n(seq, 4);
    std::vector<std::string> words;
    words.reserve(seq.size());
    for (TokenId t : seq) words.push_back(vocab.token(t));
    r.keyword_hit_rate += keyword_hit_rate(words, keywords);
    r.ppl += perplexity(seq, lm);
    if (with_control) csim += control_similarity(seq, control_embedding, *multimodal);
  }
  const double inv = 1.0 / static_cast<double>(sequences.size());
  r.distinct_2 *= inv;
  r.distinct_4 *= inv;
  r.keyword_hit_rate *= inv;
  r.ppl *= inv;
  if (with_control) r.control_sim = csim * inv;
  return r;
}

}  // namespace guidedgen
