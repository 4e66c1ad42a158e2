// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace guidedgen {

using TokenId = std::int32_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, flags, or user-supplied inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Failure inside an oracle (LM, textual or multimodal embedder).
class OracleError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (embedding tables, corpora, caches).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Ordered, duplicate-free token inventory. id_of(tokens()[i]) == i.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::string& token(TokenId id) const;
  std::optional<TokenId> id_of(std::string_view token) const;
  bool contains(std::string_view token) const {
    return id_of(token).has_value();
  }
  bool valid_id(TokenId id) const {
    return id >= 0 && static_cast<std::size_t>(id) < tokens_.size();
  }

  // FNV-1a over the tokens joined by '\n'; identifies the inventory across
  // processes (cache keys, bridge handshake).
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

  // Maps whitespace-separated text to ids; throws ConfigError naming the
  // first unknown token.
  std::vector<TokenId> encode(std::string_view text) const;
  std::string decode(const std::vector<TokenId>& ids) const;

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId, StringHash, std::equal_to<>> ids_;
  std::uint64_t hash_ = 0;
};

// N keywords; N == 0 disables textual guidance.
struct TextualControl {
  std::vector<std::string> keywords;

  bool enabled() const { return !keywords.empty(); }
  std::size_t size() const { return keywords.size(); }
};

// Sentence-level control: either a raw embedding or a reference string that
// the multimodal oracle resolves (a file name, an image id, a description).
struct VisualControl {
  std::variant<std::monostate, std::vector<double>, std::string> payload;

  static VisualControl from_vector(std::vector<double> v) {
    return VisualControl{std::move(v)};
  }
  static VisualControl from_ref(std::string ref) {
    return VisualControl{std::move(ref)};
  }
  bool empty() const {
    return std::holds_alternative<std::monostate>(payload);
  }
};

struct StepWeights {
  double d_t = 0.0;
  double d_v = 0.0;
  double alpha_t = 0.0;
  double beta_t = 0.0;
};

std::vector<std::string> split_whitespace(std::string_view text);
std::vector<std::string> split_list(std::string_view text, char sep);

std::uint64_t fnv1a(std::string_view bytes,
                    std::uint64_t seed = 14695981039346656037ull);
std::string to_hex(std::uint64_t value);

}  // namespace guidedgen
