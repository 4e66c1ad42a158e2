// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "guidedgen/oracles.hpp"
#include "guidedgen/types.hpp"

namespace guidedgen {

// The k highest-scoring tokens, best first; equal scores order by lower id.
struct CandidateSet {
  std::vector<TokenId> token_ids;
  std::vector<double> base_scores;

  std::size_t size() const { return token_ids.size(); }
};

// Throws ConfigError unless 1 <= k <= scores.size().
CandidateSet candidate_set(std::span<const double> scores, int k);

// cos(embed_text(sequence), control).
double joint_similarity(std::span<const TokenId> sequence,
                        std::span<const double> control_embedding,
                        const MultimodalOracle& oracle);

// Memo of joint similarities keyed by the exact token sequence; valid for
// one control embedding and oracle.
class JointSimilarityCache {
 public:
  double get_or_compute(std::span<const TokenId> sequence,
                        std::span<const double> control_embedding,
                        const MultimodalOracle& oracle);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::vector<TokenId>, double> entries_;
};

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> logits);

// Softmax over candidates of joint_similarity(prefix + w, control). When a
// cache is given it serves repeated sequences.
std::vector<double> magic_term(std::span<const TokenId> prefix,
                               const CandidateSet& cands,
                               std::span<const double> control_embedding,
                               const MultimodalOracle& oracle,
                               JointSimilarityCache* cache = nullptr);

// base_score(w) + beta_t * magic_weight(w) for each candidate.
std::vector<double> combined_candidate_scores(const CandidateSet& cands,
                                              std::span<const double> magic_weights,
                                              double beta_t);

}  // namespace guidedgen
