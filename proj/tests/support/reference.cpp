// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "reference.hpp"

#include <algorithm>
#include <cmath>

#include "guidedgen/vector_math.hpp"

namespace guidedgen::testing {
namespace {

std::vector<double> row(const EmbeddingTable& t, TokenId id) {
  auto v = t.vector(id);
  return {v.begin(), v.end()};
}

std::vector<double> mean_normalized(const EmbeddingTable& t, const std::vector<TokenId>& seq) {
  std::vector<double> m(static_cast<std::size_t>(t.dim()), 0.0);
  for (TokenId id : seq) {
    auto v = t.vector(id);
    for (std::size_t j = 0; j < m.size(); ++j) m[j] += v[j];
  }
  for (double& x : m) x /= static_cast<double>(seq.size());
  double n = 0;
  for (double x : m) n += x * x;
  n = std::sqrt(n);
  for (double& x : m) x /= n;
  return m;
}

double max_cosine(const std::vector<double>& h, const std::vector<std::vector<double>>& hist) {
  double best = 0.0;
  bool any = false;
  for (const auto& x : hist) {
    const double c = ref_cosine(h, x);
    if (!any || c > best) best = c;
    any = true;
  }
  return best;
}

// Indices of the k largest values, lower index first on ties.
std::vector<std::size_t> top_k(const std::vector<double>& s, int k) {
  std::vector<std::size_t> idx(s.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

// Scores closer than this count as tied; the arithmetic here is not
// bit-identical to the library's.
constexpr double kTieTolerance = 1e-10;

bool better(double score, std::size_t id, double best_score, std::size_t best_id) {
  if (score > best_score + kTieTolerance) return true;
  return score >= best_score - kTieTolerance && id < best_id;
}

}  // namespace

double ref_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(d / std::sqrt(na * nb), -1.0, 1.0);
}

std::vector<TokenId> reference_generate(const ReferenceInputs& in, const DecoderConfig& cfg,
                                        std::vector<TokenId> prefix,
                                        std::optional<TokenId> eos) {
  const std::size_t V = in.lm->vocab_size();
  const std::size_t N = in.keywords.size();

  // Keyword similarity matrix, one double loop.
  std::vector<std::vector<double>> sim(N, std::vector<double>(V, 0.0));
  for (std::size_t r = 0; r < N; ++r) {
    for (std::size_t i = 0; i < V; ++i) {
      if (!in.emb->has(static_cast<TokenId>(i))) continue;
      double c = ref_cosine(row(*in.emb, in.keywords[r]), row(*in.emb, static_cast<TokenId>(i)));
      if (cfg.floor_similarity) c = std::max(c, 0.0);
      sim[r][i] = c;
    }
  }

  std::vector<double> ctl;
  if (in.control) {
    ctl = *in.control;
    double n = 0;
    for (double x : ctl) n += x * x;
    for (double& x : ctl) x /= std::sqrt(n);
  }

  auto clamp_weight = [&](double signal, double upper) {
    double w = std::min(signal / cfg.lambda, upper);
    return cfg.allow_negative_weights ? w : std::max(w, 0.0);
  };

  Rng rng(cfg.seed);
  std::vector<std::vector<double>> hist;
  for (std::size_t i = 0; i < prefix.size(); ++i) hist.push_back(row(*in.emb, prefix[i]));

  std::vector<TokenId> out;
  for (int step = 0; step < cfg.max_len; ++step) {
    const std::vector<double> p = in.lm->next_distribution(prefix);
    std::vector<double> shifted = p;
    if (N > 0) {
      std::vector<double> kp;
      for (TokenId id : in.keywords) kp.push_back(p[static_cast<std::size_t>(id)]);
      std::vector<std::size_t> order(N);
      for (std::size_t i = 0; i < N; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (kp[a] != kp[b]) return kp[a] > kp[b];
        return in.keywords[a] < in.keywords[b];
      });
      double sum = 0;
      for (int i = 0; i < *cfg.n_hat; ++i) sum += kp[order[static_cast<std::size_t>(i)]];
      const double d_t = sum / *cfg.n_hat;
      const double alpha = cfg.dynamic_alpha ? clamp_weight(d_t, cfg.alpha_max) : cfg.alpha;

      std::vector<double> c(V);
      switch (cfg.selection) {
        case SelectionMode::kStepwiseRandom:
          c = sim[rng.uniform_index(N)];
          break;
        case SelectionMode::kMeanPooling:
          for (std::size_t i = 0; i < V; ++i) {
            double s = 0;
            for (std::size_t r = 0; r < N; ++r) s += sim[r][i];
            c[i] = s * (1.0 / static_cast<double>(N));
          }
          break;
        case SelectionMode::kWordwiseMax:
          for (std::size_t i = 0; i < V; ++i) {
            double m = sim[0][i];
            for (std::size_t r = 1; r < N; ++r) m = std::max(m, sim[r][i]);
            c[i] = m;
          }
          break;
      }
      for (std::size_t i = 0; i < V; ++i) shifted[i] = p[i] + alpha * c[i];
    }

    const auto cand = top_k(shifted, cfg.k);
    std::vector<double> magic(cand.size(), 0.0);
    double beta = 0.0;
    if (in.control) {
      double d_v = 0;
      for (std::size_t w : cand) {
        d_v += ref_cosine(mean_normalized(*in.mm, {static_cast<TokenId>(w)}), ctl);
      }
      d_v /= static_cast<double>(cand.size());
      beta = cfg.dynamic_beta ? clamp_weight(d_v, cfg.beta_max) : cfg.beta;
      std::vector<double> e(cand.size());
      double z = 0;
      double top = -1e300;
      std::vector<double> s(cand.size());
      for (std::size_t j = 0; j < cand.size(); ++j) {
        std::vector<TokenId> seq = prefix;
        seq.push_back(static_cast<TokenId>(cand[j]));
        s[j] = ref_cosine(mean_normalized(*in.mm, seq), ctl);
        top = std::max(top, s[j]);
      }
      for (std::size_t j = 0; j < cand.size(); ++j) {
        e[j] = std::exp(s[j] - top);
        z += e[j];
      }
      for (std::size_t j = 0; j < cand.size(); ++j) magic[j] = e[j] / z;
    }

    std::size_t best = 0;
    double best_score = 0;
    for (std::size_t j = 0; j < cand.size(); ++j) {
      const double conf = shifted[cand[j]];
      const double pen = max_cosine(row(*in.emb, static_cast<TokenId>(cand[j])), hist);
      const double simctg = (1.0 - cfg.eta) * conf - cfg.eta * pen;
      const double score = cfg.beta_double_apply
                               ? simctg + beta * (conf + cfg.beta * magic[j])
                               : simctg + beta * magic[j];
      if (j == 0 || better(score, cand[j], best_score, cand[best])) {
        best = j;
        best_score = score;
      }
    }
    const auto chosen = static_cast<TokenId>(cand[best]);
    out.push_back(chosen);
    prefix.push_back(chosen);
    hist.push_back(row(*in.emb, chosen));
    if (eos && chosen == *eos) break;
  }
  return out;
}

std::vector<TokenId> contrastive_search(const BaseLM& lm, const EmbeddingTable& emb,
                                        std::vector<TokenId> prefix, int k, double eta,
                                        int steps) {
  std::vector<std::vector<double>> hist;
  for (TokenId t : prefix) hist.push_back(row(emb, t));
  std::vector<TokenId> out;
  for (int s = 0; s < steps; ++s) {
    const auto p = lm.next_distribution(prefix);
    const auto cand = top_k(p, k);
    std::size_t best = 0;
    double best_score = 0;
    for (std::size_t j = 0; j < cand.size(); ++j) {
      const double score = (1 - eta) * p[cand[j]] -
                           eta * max_cosine(row(emb, static_cast<TokenId>(cand[j])), hist);
      if (j == 0 || better(score, cand[j], best_score, cand[best])) {
        best = j;
        best_score = score;
      }
    }
    const auto t = static_cast<TokenId>(cand[best]);
    out.push_back(t);
    prefix.push_back(t);
    hist.push_back(row(emb, t));
  }
  return out;
}

std::vector<TokenId> greedy_decode(const BaseLM& lm, std::vector<TokenId> prefix, int steps) {
  std::vector<TokenId> out;
  for (int s = 0; s < steps; ++s) {
    const auto p = lm.next_distribution(prefix);
    const auto t = static_cast<TokenId>(std::max_element(p.begin(), p.end()) - p.begin());
    out.push_back(t);
    prefix.push_back(t);
  }
  return out;
}

}  // namespace guidedgen::testing
