// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/decoder.hpp"

#include <algorithm>

namespace guidedgen {

double degeneration_penalty(std::span<const double> h_cand,
                            const std::vector<std::vector<double>>& history) {
  if (history.empty()) return 0.0;
  double best = -1.0;
  for (const auto& h : history) best = std::max(best, cosine(h_cand, h));
  return best;
}

double simctg_score(double confidence, double penalty, double eta) {
  return (1.0 - eta) * confidence - eta * penalty;
}

GuidedDecoder::GuidedDecoder(const DecoderConfig& cfg, const Vocabulary& vocab,
                             const Oracles& oracles, TextualControl tctl,
                             VisualControl vctl,
                             std::shared_ptr<const SimilarityMatrix> precomputed)
    : cfg_(validate_config(cfg, vocab, tctl)),
      vocab_(&vocab),
      oracles_(oracles),
      tctl_(std::move(tctl)),
      vctl_(std::move(vctl)) {
  if (!oracles_.lm) throw ConfigError("no base language model configured");
  if (oracles_.lm->vocab_size() != vocab.size()) {
    throw ConfigError("base LM vocabulary size " +
                      std::to_string(oracles_.lm->vocab_size()) +
                      " does not match vocabulary size " + std::to_string(vocab.size()));
  }
  for (const auto& kw : tctl_.keywords) keyword_ids_.push_back(*vocab.id_of(kw));
  if (!cfg_.eos_token.empty()) eos_ = vocab.id_of(cfg_.eos_token);
  if (!cfg_.bos_token.empty()) bos_ = vocab.id_of(cfg_.bos_token);

  if (tctl_.enabled()) {
    if (precomputed) {
      if (precomputed->rows() != tctl_.size() || precomputed->cols() != vocab.size()) {
        throw ConfigError("precomputed similarity matrix has the wrong shape");
      }
      similarity_ = std::move(precomputed);
    } else {
      if (!oracles_.textual) throw ConfigError("keywords given but no textual oracle");
      similarity_ = SimilarityCache::global().get_or_build(vocab, tctl_, *oracles_.textual,
                                                           cfg_.floor_similarity);
    }
  }
  if (!vctl_.empty()) {
    if (!oracles_.multimodal) {
      throw ConfigError("visual control given but no multimodal oracle");
    }
    control_ = oracles_.multimodal->embed_control(vctl_);
    word_cache_ = std::make_unique<WordControlSimCache>(*oracles_.multimodal, control_);
  }
}

GenerationState GuidedDecoder::start(std::span<const TokenId> prompt) const {
  GenerationState state;
  state.rng = Rng(cfg_.seed);
  if (prompt.empty()) {
    if (!bos_) throw ConfigError("empty prompt and no bos_token configured");
    state.prefix.push_back(*bos_);
  } else {
    for (TokenId t : prompt) {
      if (!vocab_->valid_id(t)) {
        throw ConfigError("prompt token id " + std::to_string(t) + " out of range");
      }
    }
    state.prefix.assign(prompt.begin(), prompt.end());
  }
  state.prompt_length = state.prefix.size();
  state.hidden_history.reserve(state.prefix.size() + static_cast<std::size_t>(cfg_.max_len));
  for (std::size_t i = 0; i < state.prefix.size(); ++i) {
    std::span<const TokenId> before(state.prefix.data(), i);
    state.hidden_history.push_back(oracles_.lm->representation(before, state.prefix[i]));
  }
  return state;
}

StepTrace GuidedDecoder::decode_step(GenerationState& state) {
  try {
    return decode_step_impl(state);
  } catch (const OracleError& e) {
    throw OracleError("step " + std::to_string(state.step + 1) + ": " + e.what());
  }
}

StepTrace GuidedDecoder::decode_step_impl(GenerationState& state) {
  StepTrace trace;
  trace.step = state.step + 1;
  const std::span<const TokenId> prefix(state.prefix);

  // Raw LM distribution.
  const std::vector<double> p_lm = oracles_.lm->next_distribution(prefix);
  if (p_lm.size() != vocab_->size()) {
    throw OracleError("next_distribution returned " + std::to_string(p_lm.size()) +
                      " probabilities for a vocabulary of " +
                      std::to_string(vocab_->size()));
  }

  // Textual weight from the unshifted distribution, then the shift.
  StepWeights& w = trace.weights;
  std::vector<double> shifted;
  if (similarity_) {
    const auto alpha = compute_alpha(p_lm, keyword_ids_, *cfg_.n_hat, cfg_.lambda,
                                     cfg_.alpha_max, cfg_.allow_negative_weights);
    w.d_t = alpha.signal;
    w.alpha_t = cfg_.dynamic_alpha ? alpha.weight : cfg_.alpha;
    const ControlVector ctrl = select_control(*similarity_, cfg_.selection, state.rng);
    trace.sampled_row = ctrl.sampled_row;
    shifted = shift_distribution(p_lm, ctrl.values, w.alpha_t);
  } else {
    shifted = p_lm;
  }

  const CandidateSet cands = candidate_set(shifted, cfg_.k);

  // Visual weight and the softmax term over candidates.
  std::vector<double> magic(cands.size(), 0.0);
  if (word_cache_) {
    const auto beta = compute_beta(cands, *word_cache_, cfg_.lambda, cfg_.beta_max,
                                   cfg_.allow_negative_weights);
    w.d_v = beta.signal;
    w.beta_t = cfg_.dynamic_beta ? beta.weight : cfg_.beta;
    magic = magic_term(prefix, cands, control_, *oracles_.multimodal, &joint_cache_);
  }

  trace.candidates.reserve(cands.size());
  std::vector<std::vector<double>> reprs;
  reprs.reserve(cands.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    CandidateScore c;
    c.token = cands.token_ids[i];
    c.confidence = cands.base_scores[i];
    reprs.push_back(oracles_.lm->representation(prefix, c.token));
    c.penalty = degeneration_penalty(reprs.back(), state.hidden_history);
    c.magic_weight = magic[i];
    c.simctg = simctg_score(c.confidence, c.penalty, cfg_.eta);
    if (cfg_.beta_double_apply) {
      c.combined = c.simctg + w.beta_t * (c.confidence + cfg_.beta * c.magic_weight);
    } else {
      c.combined = c.simctg + w.beta_t * c.magic_weight;
    }
    if (i > 0) {
      const auto& b = trace.candidates[best];
      if (c.combined > b.combined || (c.combined == b.combined && c.token < b.token)) {
        best = i;
      }
    }
    trace.candidates.push_back(c);
  }

  trace.chosen = trace.candidates[best].token;
  state.prefix.push_back(trace.chosen);
  state.hidden_history.push_back(std::move(reprs[best]));
  state.step += 1;
  state.weight_trace.push_back(w);
  return trace;
}

GenerationResult GuidedDecoder::generate(std::span<const TokenId> prompt) {
  GenerationState state = start(prompt);
  GenerationResult result;
  while (static_cast<int>(result.tokens.size()) < cfg_.max_len) {
    StepTrace t = decode_step(state);
    result.tokens.push_back(t.chosen);
    const bool eos = eos_ && t.chosen == *eos_;
    result.trace.push_back(std::move(t));
    if (eos) {
      result.stopped_at_eos = true;
      break;
    }
  }
  return result;
}

GenerationResult generate(std::span<const TokenId> prompt, const TextualControl& tctl,
                          const VisualControl& vctl, const DecoderConfig& cfg,
                          const Vocabulary& vocab, const Oracles& oracles) {
  GuidedDecoder decoder(cfg, vocab, oracles, tctl, vctl);
  return decoder.generate(prompt);
}

}  // namespace guidedgen
