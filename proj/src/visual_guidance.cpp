// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/visual_guidance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "guidedgen/vector_math.hpp"

namespace guidedgen {

CandidateSet candidate_set(std::span<const double> scores, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > scores.size()) {
    throw ConfigError("k out of range");
  }
  std::vector<TokenId> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](TokenId a, TokenId b) {
    const double sa = scores[static_cast<std::size_t>(a)];
    const double sb = scores[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), better);
  CandidateSet out;
  out.token_ids.assign(order.begin(), order.begin() + k);
  out.base_scores.reserve(static_cast<std::size_t>(k));
  for (TokenId t : out.token_ids) out.base_scores.push_back(scores[static_cast<std::size_t>(t)]);
  return out;
}

double joint_similarity(std::span<const TokenId> sequence,
                        std::span<const double> control_embedding,
                        const MultimodalOracle& oracle) {
  if (sequence.empty()) throw OracleError("joint_similarity: empty sequence");
  const auto text = oracle.embed_text(sequence);
  return cosine(text, control_embedding);
}

double JointSimilarityCache::get_or_compute(std::span<const TokenId> sequence,
                                            std::span<const double> control_embedding,
                                            const MultimodalOracle& oracle) {
  std::vector<TokenId> key(sequence.begin(), sequence.end());
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  const double sim = joint_similarity(sequence, control_embedding, oracle);
  std::lock_guard<std::mutex> lock(mu_);
  entries_.emplace(std::move(key), sim);
  return sim;
}

std::size_t JointSimilarityCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& x : out) x /= sum;
  return out;
}

std::vector<double> magic_term(std::span<const TokenId> prefix,
                               const CandidateSet& cands,
                               std::span<const double> control_embedding,
                               const MultimodalOracle& oracle,
                               JointSimilarityCache* cache) {
  if (cands.token_ids.empty()) throw Error("magic_term: empty candidate set");
  std::vector<TokenId> seq(prefix.begin(), prefix.end());
  seq.push_back(0);
  std::vector<double> sims;
  sims.reserve(cands.size());
  for (TokenId w : cands.token_ids) {
    seq.back() = w;
    sims.push_back(cache ? cache->get_or_compute(seq, control_embedding, oracle)
                         : joint_similarity(seq, control_embedding, oracle));
  }
  return softmax(sims);
}

std::vector<double> combined_candidate_scores(const CandidateSet& cands,
                                              std::span<const double> magic_weights,
                                              double beta_t) {
  if (magic_weights.size() != cands.size()) {
    throw Error("combined_candidate_scores: length mismatch");
  }
  std::vector<double> out(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    out[i] = cands.base_scores[i] + beta_t * magic_weights[i];
  }
  return out;
}

}  // namespace guidedgen
