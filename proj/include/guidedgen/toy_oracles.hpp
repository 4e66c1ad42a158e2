// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "guidedgen/embedding_table.hpp"
#include "guidedgen/ngram_lm.hpp"
#include "guidedgen/oracles.hpp"

namespace guidedgen {

// Word-embedding table as the textual oracle. Tokens absent from the table
// are rejected rather than embedded as zeros. The id carries a fingerprint
// of the table so cached similarity matrices never alias across tables.
class TableTextualOracle final : public TextualOracle {
 public:
  TableTextualOracle(std::shared_ptr<const Vocabulary> vocab,
                     std::shared_ptr<const EmbeddingTable> table,
                     std::string id = "table");

  int dim() const override { return table_->dim(); }
  bool can_embed(std::string_view token) const override;
  std::vector<double> embed_token(std::string_view token) const override;
  std::string id() const override { return id_; }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const EmbeddingTable> table_;
  std::string id_;
};

// Synthetic joint space: text is the normalized mean of its token vectors.
// A vector control is normalized; a reference control is read as a
// whitespace-separated description and embedded like text.
class ToyMultimodalOracle final : public MultimodalOracle {
 public:
  ToyMultimodalOracle(std::shared_ptr<const Vocabulary> vocab,
                      std::shared_ptr<const EmbeddingTable> table,
                      std::string id = "toy-mm");

  int dim() const override { return table_->dim(); }
  std::vector<double> embed_text(std::span<const TokenId> tokens) const override;
  std::vector<double> embed_control(const VisualControl& control) const override;
  std::string id() const override { return id_; }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const EmbeddingTable> table_;
  std::string id_;
};

// N-gram distribution with static-embedding representations.
class ToyBaseLM final : public BaseLM {
 public:
  ToyBaseLM(std::shared_ptr<const NGramLM> lm,
            std::shared_ptr<const EmbeddingTable> representations,
            std::string id = "ngram");

  std::size_t vocab_size() const override { return lm_->vocab_size(); }
  std::vector<double> next_distribution(
      std::span<const TokenId> prefix) const override;
  std::vector<double> representation(std::span<const TokenId> prefix,
                                     TokenId token) const override;
  std::string id() const override { return id_; }

  const NGramLM& ngram() const { return *lm_; }

 private:
  std::shared_ptr<const NGramLM> lm_;
  std::shared_ptr<const EmbeddingTable> representations_;
  std::string id_;
};

}  // namespace guidedgen
