// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "guidedgen/types.hpp"

namespace guidedgen {

// Token -> vector embedder used for keyword/vocabulary similarities.
// Implementations are deterministic and safe for concurrent const calls.
class TextualOracle {
 public:
  virtual ~TextualOracle() = default;

  virtual int dim() const = 0;
  virtual bool can_embed(std::string_view token) const = 0;
  // Throws OracleError when the token cannot be embedded.
  virtual std::vector<double> embed_token(std::string_view token) const = 0;
  virtual std::string id() const = 0;
};

// Joint text/control embedder. Every output has unit Euclidean norm.
class MultimodalOracle {
 public:
  virtual ~MultimodalOracle() = default;

  virtual int dim() const = 0;
  virtual std::vector<double> embed_text(std::span<const TokenId> tokens) const = 0;
  virtual std::vector<double> embed_control(const VisualControl& control) const = 0;
  virtual std::string id() const = 0;
};

// The language model being steered.
class BaseLM {
 public:
  virtual ~BaseLM() = default;

  virtual std::size_t vocab_size() const = 0;
  // Probability vector over the vocabulary; non-negative, sums to 1.
  virtual std::vector<double> next_distribution(
      std::span<const TokenId> prefix) const = 0;
  // Representation of `token` following `prefix`; the degeneration penalty
  // compares these.
  virtual std::vector<double> representation(std::span<const TokenId> prefix,
                                             TokenId token) const = 0;
  virtual std::string id() const = 0;
};

// Non-owning bundle handed to the decoder and metrics.
struct Oracles {
  const BaseLM* lm = nullptr;
  const TextualOracle* textual = nullptr;
  const MultimodalOracle* multimodal = nullptr;
};

}  // namespace guidedgen
