// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "guidedgen/config.hpp"
#include "guidedgen/dynamic_weighting.hpp"
#include "guidedgen/oracles.hpp"
#include "guidedgen/textual_guidance.hpp"
#include "guidedgen/types.hpp"
#include "guidedgen/vector_math.hpp"
#include "guidedgen/visual_guidance.hpp"

namespace guidedgen {

// Per-candidate components of the step objective.
struct CandidateScore {
  TokenId token = 0;
  double confidence = 0.0;    // shifted score p'_LM(w)
  double penalty = 0.0;       // max cosine against emitted representations
  double magic_weight = 0.0;  // softmax share of the joint similarity
  double simctg = 0.0;        // (1 - eta) * confidence - eta * penalty
  double combined = 0.0;      // simctg + beta_t * magic_weight
};

struct StepTrace {
  int step = 0;  // 1-based
  TokenId chosen = 0;
  StepWeights weights;
  int sampled_row = -1;  // SR keyword row, -1 otherwise
  std::vector<CandidateScore> candidates;
};

struct GenerationState {
  std::vector<TokenId> prefix;
  std::vector<std::vector<double>> hidden_history;
  std::size_t prompt_length = 0;
  int step = 0;
  Rng rng;
  std::vector<StepWeights> weight_trace;
};

struct GenerationResult {
  std::vector<TokenId> tokens;  // generated tokens only
  std::vector<StepTrace> trace;
  bool stopped_at_eos = false;
};

// max over history of cosine(h_cand, h_j); 0 for an empty history.
double degeneration_penalty(std::span<const double> h_cand,
                            const std::vector<std::vector<double>>& history);

// (1 - eta) * confidence - eta * penalty.
double simctg_score(double confidence, double penalty, double eta);

// One guided-generation session over shared read-only oracles. The keyword
// similarity matrix and the control embedding are resolved at construction.
class GuidedDecoder {
 public:
  // `precomputed` replaces the similarity-matrix build when given; it must
  // be N x V for the keywords and vocabulary. Otherwise the process-wide
  // SimilarityCache is consulted.
  GuidedDecoder(const DecoderConfig& cfg, const Vocabulary& vocab,
                const Oracles& oracles, TextualControl tctl, VisualControl vctl,
                std::shared_ptr<const SimilarityMatrix> precomputed = nullptr);

  const DecoderConfig& config() const { return cfg_; }
  const SimilarityMatrix* similarity() const { return similarity_.get(); }
  const std::vector<TokenId>& keyword_ids() const { return keyword_ids_; }
  const std::vector<double>& control_embedding() const { return control_; }

  // Throws ConfigError for an empty prompt without a configured BOS.
  GenerationState start(std::span<const TokenId> prompt) const;

  // Scores the candidates for the next position, appends the winner to the
  // state and returns its trace.
  StepTrace decode_step(GenerationState& state);

  // Runs until eos_token is emitted or max_len tokens were generated.
  GenerationResult generate(std::span<const TokenId> prompt);

 private:
  StepTrace decode_step_impl(GenerationState& state);

  DecoderConfig cfg_;
  const Vocabulary* vocab_;
  Oracles oracles_;
  TextualControl tctl_;
  VisualControl vctl_;
  std::vector<TokenId> keyword_ids_;
  std::shared_ptr<const SimilarityMatrix> similarity_;
  std::vector<double> control_;
  std::optional<TokenId> eos_;
  std::optional<TokenId> bos_;
  std::unique_ptr<WordControlSimCache> word_cache_;
  JointSimilarityCache joint_cache_;
};

// Validates the config and runs one session.
GenerationResult generate(std::span<const TokenId> prompt, const TextualControl& tctl,
                          const VisualControl& vctl, const DecoderConfig& cfg,
                          const Vocabulary& vocab, const Oracles& oracles);

}  // namespace guidedgen
