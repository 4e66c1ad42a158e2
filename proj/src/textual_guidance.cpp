// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/textual_guidance.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace guidedgen {

SimilarityMatrix::SimilarityMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw FormatError("similarity matrix: value count does not match shape");
  }
}

SimilarityMatrix build_similarity_matrix(const Vocabulary& vocab,
                                         const TextualControl& tctl,
                                         const TextualOracle& oracle,
                                         bool floor_negative) {
  const std::size_t n = tctl.keywords.size();
  const std::size_t v = vocab.size();
  std::vector<std::vector<double>> keyword_vecs;
  keyword_vecs.reserve(n);
  for (const auto& kw : tctl.keywords) {
    if (!oracle.can_embed(kw)) {
      throw OracleError("textual oracle: no embedding for keyword '" + kw + "'");
    }
    keyword_vecs.push_back(oracle.embed_token(kw));
  }
  std::vector<double> values(n * v, 0.0);
  for (std::size_t i = 0; i < v; ++i) {
    const std::string& tok = vocab.tokens()[i];
    if (!oracle.can_embed(tok)) continue;
    const auto tv = oracle.embed_token(tok);
    for (std::size_t r = 0; r < n; ++r) {
      double c = cosine(tv, keyword_vecs[r]);
      if (floor_negative) c = std::max(c, 0.0);
      values[r * v + i] = c;
    }
  }
  return SimilarityMatrix(n, v, std::move(values));
}

ControlVector select_control(const SimilarityMatrix& matrix, SelectionMode mode,
                             Rng& rng) {
  ControlVector out;
  out.source = mode;
  const std::size_t n = matrix.rows();
  const std::size_t v = matrix.cols();
  if (n == 0) {
    out.values.assign(v, 0.0);
    return out;
  }
  switch (mode) {
    case SelectionMode::kStepwiseRandom: {
      const auto r = rng.uniform_index(n);
      auto row = matrix.row(r);
      out.values.assign(row.begin(), row.end());
      out.sampled_row = static_cast<int>(r);
      break;
    }
    case SelectionMode::kMeanPooling: {
      out.values.assign(v, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        auto row = matrix.row(r);
        for (std::size_t i = 0; i < v; ++i) out.values[i] += row[i];
      }
      const double inv = 1.0 / static_cast<double>(n);
      for (double& x : out.values) x *= inv;
      break;
    }
    case SelectionMode::kWordwiseMax: {
      auto first = matrix.row(0);
      out.values.assign(first.begin(), first.end());
      for (std::size_t r = 1; r < n; ++r) {
        auto row = matrix.row(r);
        // Strict comparison keeps the earlier keyword on ties.
        for (std::size_t i = 0; i < v; ++i) {
          if (row[i] > out.values[i]) out.values[i] = row[i];
        }
      }
      break;
    }
  }
  return out;
}

std::vector<double> shift_distribution(std::span<const double> p_lm,
                                       std::span<const double> ctrl,
                                       double alpha_t) {
  if (p_lm.size() != ctrl.size()) {
    throw Error("shift_distribution: length mismatch (" +
                std::to_string(p_lm.size()) + " vs " +
                std::to_string(ctrl.size()) + ")");
  }
  std::vector<double> out(p_lm.size());
  for (std::size_t i = 0; i < p_lm.size(); ++i) out[i] = p_lm[i] + alpha_t * ctrl[i];
  return out;
}

SimilarityCache& SimilarityCache::global() {
  static SimilarityCache cache;
  return cache;
}

std::shared_ptr<const SimilarityMatrix> SimilarityCache::get_or_build(
    const Vocabulary& vocab, const TextualControl& tctl,
    const TextualOracle& oracle, bool floor_negative) {
  Key key{vocab.hash(), tctl.keywords, oracle.id(), floor_negative};
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) {
      ++hits_;
      return it->second;
    }
  }
  auto built = std::make_shared<const SimilarityMatrix>(
      build_similarity_matrix(vocab, tctl, oracle, floor_negative));
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = entries_.emplace(std::move(key), built);
  if (inserted) ++builds_;
  return it->second;
}

std::size_t SimilarityCache::builds() const {
  std::lock_guard<std::mutex> lock(mu_);
  return builds_;
}

std::size_t SimilarityCache::hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hits_;
}

void SimilarityCache::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  entries_.clear();
  builds_ = hits_ = 0;
}

std::uint64_t similarity_key_hash(const Vocabulary& vocab, const TextualControl& tctl,
                                  const TextualOracle& oracle, bool floor_negative) {
  std::uint64_t h = fnv1a(vocab.hash_hex());
  for (const auto& kw : tctl.keywords) {
    h = fnv1a("\x1f", h);
    h = fnv1a(kw, h);
  }
  h = fnv1a("\x1e", h);
  h = fnv1a(oracle.id(), h);
  h = fnv1a(std::to_string(oracle.dim()), h);
  h = fnv1a(floor_negative ? "floor" : "raw", h);
  return h;
}

namespace {

constexpr char kMagic[4] = {'Z', 'G', 'S', 'M'};
constexpr std::uint32_t kCacheVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::little) {
    bytes = bits;
  } else {
    std::reverse_copy(bits.begin(), bits.end(), bytes.begin());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw FormatError("similarity cache: truncated file");
  }
  if constexpr (std::endian::native != std::endian::little) {
    std::reverse(bytes.begin(), bytes.end());
  }
  return std::bit_cast<T>(bytes);
}

}  // namespace

void write_similarity_cache(const std::filesystem::path& path,
                            const SimilarityMatrix& matrix, std::uint64_t key_hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write similarity cache " + path.string());
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kCacheVersion);
  put_le<std::uint64_t>(out, matrix.rows());
  put_le<std::uint64_t>(out, matrix.cols());
  put_le<std::uint64_t>(out, key_hash);
  for (double x : matrix.values()) put_le<double>(out, x);
}

SimilarityMatrix read_similarity_cache(const std::filesystem::path& path,
                                       std::uint64_t expected_key_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read similarity cache " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("similarity cache: bad magic");
  }
  if (get_le<std::uint32_t>(in) != kCacheVersion) {
    throw FormatError("similarity cache: unsupported version");
  }
  const auto rows = get_le<std::uint64_t>(in);
  const auto cols = get_le<std::uint64_t>(in);
  const auto key = get_le<std::uint64_t>(in);
  if (key != expected_key_hash) {
    throw FormatError("similarity cache: key mismatch (vocabulary, keywords or oracle changed)");
  }
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto remaining = static_cast<std::uint64_t>(in.tellg() - here);
  in.seekg(here);
  if (cols != 0 && rows > remaining / sizeof(double) / cols) {
    throw FormatError("similarity cache: truncated file");
  }
  std::vector<double> values(rows * cols);
  for (double& x : values) x = get_le<double>(in);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("similarity cache: trailing bytes");
  }
  return SimilarityMatrix(rows, cols, std::move(values));
}

}  // namespace guidedgen
