// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace guidedgen {

double dot(std::span<const double> a, std::span<const double> b);
double l2_norm(std::span<const double> a);

// Cosine similarity clamped to [-1, 1]. A zero-norm operand yields 0 and
// bumps the process-wide counter returned by zero_norm_cosine_count().
double cosine(std::span<const double> a, std::span<const double> b);
std::uint64_t zero_norm_cosine_count();
void reset_zero_norm_cosine_count();

// Returns false (and leaves v untouched) when v has zero norm.
bool normalize_in_place(std::vector<double>& v);

// Session RNG. mt19937_64 output is fully specified by the standard; the
// index draw below uses rejection so results are identical on every
// standard library (std::uniform_int_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace guidedgen
