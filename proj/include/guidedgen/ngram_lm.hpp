// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "guidedgen/types.hpp"

namespace guidedgen {

// Whitespace-tokenized corpus, one sentence per non-empty line.
using Corpus = std::vector<std::vector<std::string>>;

Corpus read_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::string_view text);

// Tokens in order of first appearance, followed by any `extra` tokens not
// already present.
Vocabulary vocabulary_from_corpus(const Corpus& corpus,
                                  const std::vector<std::string>& extra = {});

std::vector<std::vector<TokenId>> encode_corpus(const Corpus& corpus,
                                                const Vocabulary& vocab);

// Add-k smoothed n-gram model:
//   P(w | ctx) = (count(ctx, w) + k) / (count(ctx) + k * V)
// where ctx is the last min(order - 1, |prefix|) tokens. Counts are taken per
// sentence, so positions near a sentence start contribute shorter contexts.
class NGramLM {
 public:
  NGramLM(const std::vector<std::vector<TokenId>>& sentences, int order,
          double smoothing, std::size_t vocab_size);

  int order() const { return order_; }
  double smoothing() const { return smoothing_; }
  std::size_t vocab_size() const { return vocab_size_; }

  std::uint64_t context_count(std::span<const TokenId> context) const;
  std::uint64_t count(std::span<const TokenId> context, TokenId next) const;

  std::vector<double> next_distribution(std::span<const TokenId> prefix) const;

  // Last min(order - 1, |prefix|) tokens.
  std::span<const TokenId> context_of(std::span<const TokenId> prefix) const;

 private:
  struct ContextHash {
    std::size_t operator()(const std::vector<TokenId>& key) const;
  };
  struct ContextCounts {
    std::uint64_t total = 0;
    std::unordered_map<TokenId, std::uint64_t> next;
  };
  const ContextCounts* find(std::span<const TokenId> context) const;

  int order_;
  double smoothing_;
  std::size_t vocab_size_;
  std::unordered_map<std::vector<TokenId>, ContextCounts, ContextHash> counts_;
};

}  // namespace guidedgen
