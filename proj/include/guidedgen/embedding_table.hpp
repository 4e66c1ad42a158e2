// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "guidedgen/types.hpp"

namespace guidedgen {

// Dense per-token vectors aligned with a Vocabulary. Tokens that were never
// set read back as the zero vector and report has() == false.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t vocab_size, int dim);

  int dim() const { return dim_; }
  std::size_t vocab_size() const { return present_.size(); }
  std::size_t coverage() const { return coverage_; }

  bool has(TokenId id) const;
  std::span<const double> vector(TokenId id) const;
  void set(TokenId id, std::span<const double> values);

  // FNV-1a over dim, presence flags and raw vector bytes.
  std::uint64_t fingerprint() const;

 private:
  int dim_ = 0;
  std::vector<double> data_;
  std::vector<bool> present_;
  std::size_t coverage_ = 0;
};

struct TableLoadStats {
  std::size_t lines = 0;
  std::size_t covered = 0;       // vocabulary tokens found in the file
  std::size_t out_of_vocab = 0;  // file tokens not in the vocabulary
};

// Reads GloVe text layout: "token v1 ... vdim" per line. The dimension is
// taken from dim_hint or the first line and must be consistent. Throws
// FormatError on malformed lines.
EmbeddingTable load_embedding_table(const std::filesystem::path& path,
                                    const Vocabulary& vocab,
                                    std::optional<int> dim_hint = std::nullopt,
                                    TableLoadStats* stats = nullptr);
EmbeddingTable parse_embedding_table(std::string_view text,
                                     const Vocabulary& vocab,
                                     std::optional<int> dim_hint = std::nullopt,
                                     TableLoadStats* stats = nullptr);

// Writes present rows in vocabulary order with round-trip float formatting.
void write_embedding_table(const std::filesystem::path& path,
                           const EmbeddingTable& table, const Vocabulary& vocab);

// Mean-pools the token vectors and L2-normalizes. Throws OracleError on an
// empty sequence, an uncovered token, or a zero-norm mean.
std::vector<double> toy_embed_text(std::span<const TokenId> tokens,
                                   const EmbeddingTable& table);

// Context-independent hidden state: the token's static embedding.
std::vector<double> toy_representation(std::span<const TokenId> prefix,
                                       TokenId token, const EmbeddingTable& table);

}  // namespace guidedgen
