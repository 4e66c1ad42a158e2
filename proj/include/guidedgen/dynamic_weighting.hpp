// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "guidedgen/oracles.hpp"
#include "guidedgen/types.hpp"
#include "guidedgen/visual_guidance.hpp"

namespace guidedgen {

// min(signal / lambda, upper), floored at 0 unless allow_negative.
double dynamic_weight(double signal, double lambda, double upper,
                      bool allow_negative = false);

struct WeightResult {
  double signal = 0.0;  // D_T or D_V
  double weight = 0.0;  // alpha_t or beta_t
};

// The n_hat keywords with the highest probability under p_lm (unshifted),
// ties to the lower token id.
std::vector<TokenId> select_keyword_subset(std::span<const double> p_lm,
                                           std::span<const TokenId> keyword_ids,
                                           int n_hat);

// D_T = mean p_lm over the selected keywords; alpha_t = dynamic_weight(D_T).
// Throws ConfigError when a keyword id is outside p_lm or n_hat is outside
// [1, |keyword_ids|].
WeightResult compute_alpha(std::span<const double> p_lm,
                           std::span<const TokenId> keyword_ids, int n_hat,
                           double lambda, double alpha_max,
                           bool allow_negative = false);

// Lazily filled map from token id to cos(embed_text([token]), control).
// Inserts are idempotent so concurrent fills are harmless.
class WordControlSimCache {
 public:
  WordControlSimCache(const MultimodalOracle& oracle,
                      std::vector<double> control_embedding);

  double get(TokenId token);
  std::size_t size() const;

 private:
  const MultimodalOracle* oracle_;
  std::vector<double> control_;
  mutable std::shared_mutex mu_;
  std::unordered_map<TokenId, double> entries_;
};

// D_V = mean over candidates of the cached word/control cosine;
// beta_t = dynamic_weight(D_V).
WeightResult compute_beta(const CandidateSet& cands, WordControlSimCache& cache,
                          double lambda, double beta_max,
                          bool allow_negative = false);

// Same rule over explicit similarities; used where no oracle is involved.
WeightResult compute_beta_from_similarities(std::span<const double> sims,
                                            double lambda, double beta_max,
                                            bool allow_negative = false);

}  // namespace guidedgen
