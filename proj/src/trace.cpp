// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/trace.hpp"

namespace guidedgen {

using nlohmann::json;

json step_trace_to_json(const StepTrace& step, const Vocabulary& vocab,
                        std::optional<std::size_t> prompt_index) {
  json j;
  if (prompt_index) j["prompt"] = *prompt_index;
  j["step"] = step.step;
  j["token_id"] = step.chosen;
  j["token"] = vocab.token(step.chosen);
  j["alpha_t"] = step.weights.alpha_t;
  j["beta_t"] = step.weights.beta_t;
  j["d_t"] = step.weights.d_t;
  j["d_v"] = step.weights.d_v;
  j["sampled_row"] = step.sampled_row;
  json cands = json::array();
  for (const auto& c : step.candidates) {
    cands.push_back({{"token_id", c.token},
                     {"token", vocab.token(c.token)},
                     {"confidence", c.confidence},
                     {"penalty", c.penalty},
                     {"magic", c.magic_weight},
                     {"simctg", c.simctg},
                     {"combined", c.combined}});
  }
  j["candidates"] = std::move(cands);
  return j;
}

void write_trace_jsonl(std::ostream& out, const std::vector<StepTrace>& trace,
                       const Vocabulary& vocab,
                       std::optional<std::size_t> prompt_index) {
  for (const auto& step : trace) {
    out << step_trace_to_json(step, vocab, prompt_index).dump() << '\n';
  }
}

std::string check_trace_invariants(const StepTrace& step, const DecoderConfig& cfg) {
  if (step.candidates.empty()) return "step " + std::to_string(step.step) + ": no candidates";
  const CandidateScore* best = &step.candidates.front();
  bool chosen_present = false;
  for (const auto& c : step.candidates) {
    if (c.combined > best->combined ||
        (c.combined == best->combined && c.token < best->token)) {
      best = &c;
    }
    chosen_present |= c.token == step.chosen;
  }
  const std::string where = "step " + std::to_string(step.step) + ": ";
  if (!chosen_present) return where + "chosen token is not a candidate";
  if (best->token != step.chosen) return where + "chosen token is not the argmax";
  if (!cfg.allow_negative_weights) {
    if (cfg.dynamic_alpha &&
        (step.weights.alpha_t < 0.0 || step.weights.alpha_t > cfg.alpha_max)) {
      return where + "alpha_t outside [0, alpha_max]";
    }
    if (cfg.dynamic_beta &&
        (step.weights.beta_t < 0.0 || step.weights.beta_t > cfg.beta_max)) {
      return where + "beta_t outside [0, beta_max]";
    }
  }
  return {};
}

}  // namespace guidedgen
