// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "guidedgen/config.hpp"
#include "guidedgen/oracles.hpp"
#include "guidedgen/types.hpp"
#include "guidedgen/vector_math.hpp"

namespace guidedgen {

// N x V keyword/vocabulary cosine similarities, row-major, rows in keyword
// order.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }
  std::span<const double> row(std::size_t n) const {
    return {values_.data() + n * cols_, cols_};
  }
  double at(std::size_t n, std::size_t i) const { return values_[n * cols_ + i]; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const SimilarityMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct ControlVector {
  std::vector<double> values;
  SelectionMode source = SelectionMode::kWordwiseMax;
  // Row drawn by SR; -1 for MP/WM.
  int sampled_row = -1;
};

// Cosine of every vocabulary token against every keyword. Tokens the oracle
// cannot embed score 0. Throws OracleError naming an unembeddable keyword.
// With floor_negative, cosines below 0 are raised to 0.
SimilarityMatrix build_similarity_matrix(const Vocabulary& vocab,
                                         const TextualControl& tctl,
                                         const TextualOracle& oracle,
                                         bool floor_negative = false);

// SR draws one row per call from rng; MP is the column mean; WM is the column
// max (lower keyword index wins ties).
ControlVector select_control(const SimilarityMatrix& matrix, SelectionMode mode,
                             Rng& rng);

// p_lm + alpha_t * ctrl, not renormalized.
std::vector<double> shift_distribution(std::span<const double> p_lm,
                                       std::span<const double> ctrl,
                                       double alpha_t);

// Process-wide memo of similarity matrices keyed by (vocabulary hash,
// keyword list, oracle id, floor flag).
class SimilarityCache {
 public:
  static SimilarityCache& global();

  std::shared_ptr<const SimilarityMatrix> get_or_build(
      const Vocabulary& vocab, const TextualControl& tctl,
      const TextualOracle& oracle, bool floor_negative = false);

  std::size_t builds() const;
  std::size_t hits() const;
  void clear();

 private:
  using Key = std::tuple<std::uint64_t, std::vector<std::string>, std::string, bool>;
  mutable std::mutex mu_;
  std::map<Key, std::shared_ptr<const SimilarityMatrix>> entries_;
  std::size_t builds_ = 0;
  std::size_t hits_ = 0;
};

// Identifies the inputs of a matrix in the binary cache header.
std::uint64_t similarity_key_hash(const Vocabulary& vocab, const TextualControl& tctl,
                                  const TextualOracle& oracle, bool floor_negative);

// Binary cache: "ZGSM", u32 version, u64 N, u64 V, u64 key hash, then N*V
// little-endian IEEE-754 doubles, row-major.
void write_similarity_cache(const std::filesystem::path& path,
                            const SimilarityMatrix& matrix, std::uint64_t key_hash);
// Throws FormatError on a bad header or a key/shape mismatch.
SimilarityMatrix read_similarity_cache(const std::filesystem::path& path,
                                       std::uint64_t expected_key_hash);

}  // namespace guidedgen
