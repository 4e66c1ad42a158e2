// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/vector_math.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace guidedgen {
namespace {
std::atomic<std::uint64_t> g_zero_norm_count{0};
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0 || a.size() != b.size()) {
    g_zero_norm_count.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

std::uint64_t zero_norm_cosine_count() {
  return g_zero_norm_count.load(std::memory_order_relaxed);
}

void reset_zero_norm_cosine_count() { g_zero_norm_count.store(0); }

bool normalize_in_place(std::vector<double>& v) {
  const double n = l2_norm(v);
  if (n == 0.0 || !std::isfinite(n)) return false;
  for (double& x : v) x /= n;
  return true;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Largest multiple of n representable; draws at or above it are rejected.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

}  // namespace guidedgen
