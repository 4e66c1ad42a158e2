// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/embedding_table.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "guidedgen/config.hpp"
#include "guidedgen/vector_math.hpp"

namespace guidedgen {

EmbeddingTable::EmbeddingTable(std::size_t vocab_size, int dim)
    : dim_(dim),
      data_(vocab_size * static_cast<std::size_t>(dim), 0.0),
      present_(vocab_size, false) {
  if (dim <= 0) throw FormatError("embedding dimension must be positive");
}

bool EmbeddingTable::has(TokenId id) const {
  return id >= 0 && static_cast<std::size_t>(id) < present_.size() &&
         present_[static_cast<std::size_t>(id)];
}

std::span<const double> EmbeddingTable::vector(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= present_.size()) {
    throw OracleError("embedding lookup: token id " + std::to_string(id) +
                      " out of range");
  }
  return {data_.data() + static_cast<std::size_t>(id) * dim_,
          static_cast<std::size_t>(dim_)};
}

void EmbeddingTable::set(TokenId id, std::span<const double> values) {
  if (id < 0 || static_cast<std::size_t>(id) >= present_.size()) {
    throw OracleError("embedding set: token id out of range");
  }
  if (values.size() != static_cast<std::size_t>(dim_)) {
    throw FormatError("inconsistent dimension");
  }
  std::copy(values.begin(), values.end(),
            data_.begin() + static_cast<std::ptrdiff_t>(id) * dim_);
  if (!present_[static_cast<std::size_t>(id)]) {
    present_[static_cast<std::size_t>(id)] = true;
    ++coverage_;
  }
}

std::uint64_t EmbeddingTable::fingerprint() const {
  std::uint64_t h = fnv1a(std::to_string(dim_));
  for (std::size_t i = 0; i < present_.size(); ++i) {
    h = fnv1a(present_[i] ? "1" : "0", h);
  }
  return fnv1a(std::string_view(reinterpret_cast<const char*>(data_.data()),
                                data_.size() * sizeof(double)),
               h);
}

EmbeddingTable parse_embedding_table(std::string_view text,
                                     const Vocabulary& vocab,
                                     std::optional<int> dim_hint,
                                     TableLoadStats* stats) {
  TableLoadStats local;
  std::optional<int> dim = dim_hint;
  EmbeddingTable table;
  if (dim) table = EmbeddingTable(vocab.size(), *dim);

  std::vector<double> values;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto fields = split_whitespace(line);
    if (fields.empty()) continue;
    ++local.lines;
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() < 2) {
      throw FormatError(where + ": malformed line (no vector values)");
    }
    const int row_dim = static_cast<int>(fields.size()) - 1;
    if (!dim) {
      dim = row_dim;
      table = EmbeddingTable(vocab.size(), *dim);
    } else if (row_dim != *dim) {
      throw FormatError(where + ": inconsistent dimension (expected " +
                        std::to_string(*dim) + ", got " +
                        std::to_string(row_dim) + ")");
    }
    values.assign(static_cast<std::size_t>(row_dim), 0.0);
    for (int i = 0; i < row_dim; ++i) {
      const std::string& f = fields[static_cast<std::size_t>(i) + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(),
                                       values[static_cast<std::size_t>(i)]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw FormatError(where + ": unparsable float '" + f + "'");
      }
    }
    if (auto id = vocab.id_of(fields[0])) {
      table.set(*id, values);
    } else {
      ++local.out_of_vocab;
    }
  }
  if (!dim) throw FormatError("embedding table is empty");
  local.covered = table.coverage();
  if (stats) *stats = local;
  return table;
}

EmbeddingTable load_embedding_table(const std::filesystem::path& path,
                                    const Vocabulary& vocab,
                                    std::optional<int> dim_hint,
                                    TableLoadStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read embedding table " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_embedding_table(ss.str(), vocab, dim_hint, stats);
}

void write_embedding_table(const std::filesystem::path& path,
                           const EmbeddingTable& table, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write embedding table " + path.string());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto id = static_cast<TokenId>(i);
    if (!table.has(id)) continue;
    out << vocab.token(id);
    for (double v : table.vector(id)) out << ' ' << format_double(v);
    out << '\n';
  }
}

std::vector<double> toy_embed_text(std::span<const TokenId> tokens,
                                   const EmbeddingTable& table) {
  if (tokens.empty()) throw OracleError("embed_text: empty sequence");
  std::vector<double> mean(static_cast<std::size_t>(table.dim()), 0.0);
  for (TokenId t : tokens) {
    if (!table.has(t)) {
      throw OracleError("embed_text: token id " + std::to_string(t) +
                        " has no embedding");
    }
    auto v = table.vector(t);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
  }
  const double inv = 1.0 / static_cast<double>(tokens.size());
  for (double& x : mean) x *= inv;
  if (!normalize_in_place(mean)) throw OracleError("embed_text: zero-norm mean");
  return mean;
}

std::vector<double> toy_representation(std::span<const TokenId> /*prefix*/,
                                       TokenId token,
                                       const EmbeddingTable& table) {
  auto v = table.vector(token);
  return {v.begin(), v.end()};
}

}  // namespace guidedgen
