// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "guidedgen/oracles.hpp"
#include "guidedgen/types.hpp"

namespace guidedgen {

// |unique n-grams| / |n-grams|; 0 when the sequence is shorter than n.
double distinct_n(std::span<const TokenId> tokens, int n);

// cos(embed_text(tokens), control_embedding).
double control_similarity(std::span<const TokenId> tokens,
                          std::span<const double> control_embedding,
                          const MultimodalOracle& oracle);

// Fraction of keywords that occur at least once in tokens; 0 for no keywords.
double keyword_hit_rate(std::span<const std::string> tokens,
                        std::span<const std::string> keywords);

// exp(-(1/T) sum_t log p(x_t | context, x_<t)). Throws OracleError when the
// LM gives a token zero probability.
double perplexity(std::span<const TokenId> tokens, const BaseLM& lm,
                  std::span<const TokenId> context = {});

// Means over sequences; each metric is computed per sequence first.
struct EvalReport {
  double distinct_2 = 0.0;
  double distinct_4 = 0.0;
  std::optional<double> control_sim;
  double keyword_hit_rate = 0.0;
  double ppl = 0.0;
  std::size_t sequences = 0;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  // Fixed-order two-column table.
  std::string to_table() const;
};

EvalReport evaluate(const std::vector<std::vector<TokenId>>& sequences,
                    const Vocabulary& vocab, const std::vector<std::string>& keywords,
                    const BaseLM& lm, const MultimodalOracle* multimodal = nullptr,
                    std::span<const double> control_embedding = {});

}  // namespace guidedgen
