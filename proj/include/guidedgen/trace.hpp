// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "json.hpp"

#include "guidedgen/decoder.hpp"

namespace guidedgen {

// {"step", "token", "token_id", "alpha_t", "beta_t", "d_t", "d_v",
//  "sampled_row", "candidates": [{"token_id", "token", "confidence",
//  "penalty", "magic", "simctg", "combined"}, ...]}
// plus "prompt" when prompt_index is given.
nlohmann::json step_trace_to_json(const StepTrace& step, const Vocabulary& vocab,
                                  std::optional<std::size_t> prompt_index = std::nullopt);

// One compact JSON object per line.
void write_trace_jsonl(std::ostream& out, const std::vector<StepTrace>& trace,
                       const Vocabulary& vocab,
                       std::optional<std::size_t> prompt_index = std::nullopt);

// Empty when every trace invariant holds, else a description of the first
// violation: the chosen token must be the recorded argmax (lower id on ties)
// and the weights must respect their clamps.
std::string check_trace_invariants(const StepTrace& step, const DecoderConfig& cfg);

}  // namespace guidedgen
