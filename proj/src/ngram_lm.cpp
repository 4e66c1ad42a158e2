// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/ngram_lm.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace guidedgen {

Corpus parse_corpus(std::string_view text) {
  Corpus corpus;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto tokens = split_whitespace(text.substr(pos, end - pos));
    if (!tokens.empty()) corpus.push_back(std::move(tokens));
    pos = end + 1;
  }
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read corpus " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str());
}

Vocabulary vocabulary_from_corpus(const Corpus& corpus,
                                  const std::vector<std::string>& extra) {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, bool> seen;
  auto add = [&](const std::string& t) {
    if (seen.emplace(t, true).second) tokens.push_back(t);
  };
  for (const auto& sentence : corpus) {
    for (const auto& t : sentence) add(t);
  }
  for (const auto& t : extra) {
    if (!t.empty()) add(t);
  }
  return Vocabulary(std::move(tokens));
}

std::vector<std::vector<TokenId>> encode_corpus(const Corpus& corpus,
                                                const Vocabulary& vocab) {
  std::vector<std::vector<TokenId>> out;
  out.reserve(corpus.size());
  for (const auto& sentence : corpus) {
    std::vector<TokenId> ids;
    ids.reserve(sentence.size());
    for (const auto& t : sentence) {
      auto id = vocab.id_of(t);
      if (!id) throw FormatError("corpus token '" + t + "' is not in the vocabulary");
      ids.push_back(*id);
    }
    out.push_back(std::move(ids));
  }
  return out;
}

std::size_t NGramLM::ContextHash::operator()(
    const std::vector<TokenId>& key) const {
  std::size_t h = 1469598103934665603ull;
  for (TokenId t : key) {
    h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(t));
    h *= 1099511628211ull;
  }
  return h ^ key.size();
}

NGramLM::NGramLM(const std::vector<std::vector<TokenId>>& sentences, int order,
                 double smoothing, std::size_t vocab_size)
    : order_(order), smoothing_(smoothing), vocab_size_(vocab_size) {
  if (order < 1) throw ConfigError("n-gram order must be >= 1");
  if (!(smoothing > 0.0)) throw ConfigError("smoothing constant must be positive");
  if (vocab_size < 1) throw ConfigError("vocabulary is empty");
  const auto width = static_cast<std::size_t>(order - 1);
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0 || static_cast<std::size_t>(s[i]) >= vocab_size) {
        throw ConfigError("corpus token id out of range");
      }
      const std::size_t start = i >= width ? i - width : 0;
      std::vector<TokenId> ctx(s.begin() + static_cast<std::ptrdiff_t>(start),
                               s.begin() + static_cast<std::ptrdiff_t>(i));
      auto& c = counts_[std::move(ctx)];
      ++c.total;
      ++c.next[s[i]];
    }
  }
}

std::span<const TokenId> NGramLM::context_of(
    std::span<const TokenId> prefix) const {
  const auto width = static_cast<std::size_t>(order_ - 1);
  if (prefix.size() <= width) return prefix;
  return prefix.subspan(prefix.size() - width);
}

const NGramLM::ContextCounts* NGramLM::find(
    std::span<const TokenId> context) const {
  std::vector<TokenId> key(context.begin(), context.end());
  auto it = counts_.find(key);
  return it == counts_.end() ? nullptr : &it->second;
}

std::uint64_t NGramLM::context_count(std::span<const TokenId> context) const {
  const auto* c = find(context);
  return c ? c->total : 0;
}

std::uint64_t NGramLM::count(std::span<const TokenId> context,
                             TokenId next) const {
  const auto* c = find(context);
  if (!c) return 0;
  auto it = c->next.find(next);
  return it == c->next.end() ? 0 : it->second;
}

std::vector<double> NGramLM::next_distribution(
    std::span<const TokenId> prefix) const {
  const auto* c = find(context_of(prefix));
  const double total = c ? static_cast<double>(c->total) : 0.0;
  const double denom = total + smoothing_ * static_cast<double>(vocab_size_);
  std::vector<double> p(vocab_size_, smoothing_ / denom);
  if (c) {
    for (const auto& [tok, n] : c->next) {
      p[static_cast<std::size_t>(tok)] =
          (static_cast<double>(n) + smoothing_) / denom;
    }
  }
  return p;
}

}  // namespace guidedgen
