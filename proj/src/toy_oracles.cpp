// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/toy_oracles.hpp"

#include "guidedgen/vector_math.hpp"

namespace guidedgen {

TableTextualOracle::TableTextualOracle(std::shared_ptr<const Vocabulary> vocab,
                                       std::shared_ptr<const EmbeddingTable> table,
                                       std::string id)
    : vocab_(std::move(vocab)),
      table_(std::move(table)),
      id_(id + ":" + to_hex(table_->fingerprint())) {}

bool TableTextualOracle::can_embed(std::string_view token) const {
  auto id = vocab_->id_of(token);
  return id && table_->has(*id);
}

std::vector<double> TableTextualOracle::embed_token(std::string_view token) const {
  auto id = vocab_->id_of(token);
  if (!id || !table_->has(*id)) {
    throw OracleError("textual oracle: no embedding for '" + std::string(token) + "'");
  }
  auto v = table_->vector(*id);
  return {v.begin(), v.end()};
}

ToyMultimodalOracle::ToyMultimodalOracle(std::shared_ptr<const Vocabulary> vocab,
                                         std::shared_ptr<const EmbeddingTable> table,
                                         std::string id)
    : vocab_(std::move(vocab)), table_(std::move(table)), id_(std::move(id)) {}

std::vector<double> ToyMultimodalOracle::embed_text(
    std::span<const TokenId> tokens) const {
  return toy_embed_text(tokens, *table_);
}

std::vector<double> ToyMultimodalOracle::embed_control(
    const VisualControl& control) const {
  if (const auto* vec = std::get_if<std::vector<double>>(&control.payload)) {
    if (vec->size() != static_cast<std::size_t>(dim())) {
      throw OracleError("embed_control: control vector has dimension " +
                        std::to_string(vec->size()) + ", oracle expects " +
                        std::to_string(dim()));
    }
    std::vector<double> out = *vec;
    if (!normalize_in_place(out)) throw OracleError("embed_control: zero-norm control");
    return out;
  }
  if (const auto* ref = std::get_if<std::string>(&control.payload)) {
    std::vector<TokenId> ids;
    for (const auto& tok : split_whitespace(*ref)) {
      auto id = vocab_->id_of(tok);
      if (!id) throw OracleError("embed_control: unknown description token '" + tok + "'");
      ids.push_back(*id);
    }
    return toy_embed_text(ids, *table_);
  }
  throw OracleError("embed_control: empty visual control");
}

ToyBaseLM::ToyBaseLM(std::shared_ptr<const NGramLM> lm,
                     std::shared_ptr<const EmbeddingTable> representations,
                     std::string id)
    : lm_(std::move(lm)),
      representations_(std::move(representations)),
      id_(std::move(id)) {}

std::vector<double> ToyBaseLM::next_distribution(
    std::span<const TokenId> prefix) const {
  return lm_->next_distribution(prefix);
}

std::vector<double> ToyBaseLM::representation(std::span<const TokenId> prefix,
                                              TokenId token) const {
  return toy_representation(prefix, token, *representations_);
}

}  // namespace guidedgen
