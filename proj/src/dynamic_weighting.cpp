// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/dynamic_weighting.hpp"

#include <algorithm>
#include <mutex>

#include "guidedgen/vector_math.hpp"

namespace guidedgen {

double dynamic_weight(double signal, double lambda, double upper,
                      bool allow_negative) {
  const double w = std::min(signal / lambda, upper);
  return allow_negative ? w : std::max(w, 0.0);
}

std::vector<TokenId> select_keyword_subset(std::span<const double> p_lm,
                                           std::span<const TokenId> keyword_ids,
                                           int n_hat) {
  if (n_hat < 1 || static_cast<std::size_t>(n_hat) > keyword_ids.size()) {
    throw ConfigError("n_hat out of range");
  }
  for (TokenId id : keyword_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= p_lm.size()) {
      throw ConfigError("keyword id " + std::to_string(id) + " out of vocabulary range");
    }
  }
  std::vector<TokenId> ids(keyword_ids.begin(), keyword_ids.end());
  std::partial_sort(ids.begin(), ids.begin() + n_hat, ids.end(),
                    [&](TokenId a, TokenId b) {
                      const double pa = p_lm[static_cast<std::size_t>(a)];
                      const double pb = p_lm[static_cast<std::size_t>(b)];
                      if (pa != pb) return pa > pb;
                      return a < b;
                    });
  ids.resize(static_cast<std::size_t>(n_hat));
  return ids;
}

WeightResult compute_alpha(std::span<const double> p_lm,
                           std::span<const TokenId> keyword_ids, int n_hat,
                           double lambda, double alpha_max, bool allow_negative) {
  const auto subset = select_keyword_subset(p_lm, keyword_ids, n_hat);
  double sum = 0.0;
  for (TokenId id : subset) sum += p_lm[static_cast<std::size_t>(id)];
  WeightResult r;
  r.signal = sum / static_cast<double>(subset.size());
  r.weight = dynamic_weight(r.signal, lambda, alpha_max, allow_negative);
  return r;
}

WordControlSimCache::WordControlSimCache(const MultimodalOracle& oracle,
                                         std::vector<double> control_embedding)
    : oracle_(&oracle), control_(std::move(control_embedding)) {}

double WordControlSimCache::get(TokenId token) {
  {
    std::shared_lock lock(mu_);
    if (auto it = entries_.find(token); it != entries_.end()) return it->second;
  }
  const TokenId one[1] = {token};
  const double sim = cosine(oracle_->embed_text(one), control_);
  std::unique_lock lock(mu_);
  entries_.emplace(token, sim);
  return sim;
}

std::size_t WordControlSimCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

WeightResult compute_beta_from_similarities(std::span<const double> sims,
                                            double lambda, double beta_max,
                                            bool allow_negative) {
  if (sims.empty()) throw Error("compute_beta: empty candidate set");
  double sum = 0.0;
  for (double s : sims) sum += s;
  WeightResult r;
  r.signal = sum / static_cast<double>(sims.size());
  r.weight = dynamic_weight(r.signal, lambda, beta_max, allow_negative);
  return r;
}

WeightResult compute_beta(const CandidateSet& cands, WordControlSimCache& cache,
                          double lambda, double beta_max, bool allow_negative) {
  std::vector<double> sims;
  sims.reserve(cands.size());
  for (TokenId w : cands.token_ids) sims.push_back(cache.get(w));
  return compute_beta_from_similarities(sims, lambda, beta_max, allow_negative);
}

}  // namespace guidedgen
