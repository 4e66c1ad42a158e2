// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "guidedgen/config.hpp"

namespace guidedgen::testing {

double Gen::normal() {
  // Box-Muller; u1 is kept away from 0.
  const double u1 = 1.0 - rng_.uniform01();
  const double u2 = rng_.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> Gen::vec(std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(lo, hi);
  return v;
}

std::vector<double> Gen::gaussian(std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = normal();
  return v;
}

std::vector<double> Gen::unit(std::size_t n) {
  for (;;) {
    auto v = gaussian(n);
    double s = 0.0;
    for (double x : v) s += x * x;
    if (s < 1e-12) continue;
    for (auto& x : v) x /= std::sqrt(s);
    return v;
  }
}

std::vector<double> Gen::simplex(std::size_t n) {
  std::vector<double> v(n);
  double s = 0.0;
  for (auto& x : v) {
    x = -std::log(1.0 - rng_.uniform01()) + 1e-6;
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

std::vector<TokenId> Gen::ids(std::size_t n, int vocab_size) {
  std::vector<TokenId> out(n);
  for (auto& t : out) t = integer(0, vocab_size - 1);
  return out;
}

TokenId World::id(const std::string& token) const {
  auto i = vocab->id_of(token);
  if (!i) throw ConfigError("fixture has no token '" + token + "'");
  return *i;
}

World make_world(std::vector<std::string> tokens,
                 std::vector<std::vector<TokenId>> sentences, EmbeddingTable emb,
                 EmbeddingTable mm, int order, double smoothing) {
  World w;
  w.vocab = std::make_shared<const Vocabulary>(std::move(tokens));
  w.sentences = std::move(sentences);
  w.emb = std::make_shared<const EmbeddingTable>(std::move(emb));
  w.mm = std::make_shared<const EmbeddingTable>(std::move(mm));
  w.ngram = std::make_shared<const NGramLM>(w.sentences, order, smoothing, w.vocab->size());
  w.lm = std::make_shared<const ToyBaseLM>(w.ngram, w.emb);
  w.textual = std::make_shared<const TableTextualOracle>(w.vocab, w.emb);
  w.multimodal = std::make_shared<const ToyMultimodalOracle>(w.vocab, w.mm);
  return w;
}

EmbeddingTable random_table(Gen& g, std::size_t vocab_size, int dim) {
  EmbeddingTable t(vocab_size, dim);
  for (std::size_t i = 0; i < vocab_size; ++i) {
    t.set(static_cast<TokenId>(i), g.unit(static_cast<std::size_t>(dim)));
  }
  return t;
}

EmbeddingTable one_hot_table(std::size_t vocab_size) {
  EmbeddingTable t(vocab_size, static_cast<int>(vocab_size));
  for (std::size_t i = 0; i < vocab_size; ++i) {
    std::vector<double> v(vocab_size, 0.0);
    v[i] = 1.0;
    t.set(static_cast<TokenId>(i), v);
  }
  return t;
}

World random_world(std::uint64_t seed, int vocab_size, int dim, int order,
                   int corpus_tokens) {
  Gen g(seed);
  std::vector<std::string> tokens;
  for (int i = 0; i < vocab_size; ++i) tokens.push_back("w" + std::to_string(i));
  std::vector<std::vector<TokenId>> successors(vocab_size);
  for (auto& s : successors) s = g.ids(3, vocab_size);

  std::vector<std::vector<TokenId>> sentences;
  int produced = 0;
  while (produced < corpus_tokens) {
    const int len = g.integer(4, 10);
    std::vector<TokenId> s{g.integer(0, vocab_size - 1)};
    while (static_cast<int>(s.size()) < len) {
      const auto& succ = successors[s.back()];
      s.push_back(g.coin(0.8) ? succ[g.integer(0, 2)] : g.integer(0, vocab_size - 1));
    }
    produced += len;
    sentences.push_back(std::move(s));
  }
  EmbeddingTable emb = random_table(g, vocab_size, dim);
  EmbeddingTable mm = random_table(g, vocab_size, dim);
  return make_world(std::move(tokens), std::move(sentences), std::move(emb), std::move(mm),
                    order, 0.5);
}

namespace {

const std::vector<std::vector<std::string>>& all_themes() {
  static const std::vector<std::vector<std::string>> t = {
      {"cat", "dog", "horse", "bird", "sheep", "cow"},
      {"pizza", "cake", "banana", "apple", "sandwich"},
      {"car", "bus", "truck", "bike", "sign"},
      {"table", "chair", "bed", "couch", "lamp"},
      {"ball", "bat", "racket", "skis", "surfboard"},
  };
  return t;
}

const std::vector<std::string> kAttributes = {"red",   "small", "large",  "white",
                                              "black", "young", "wooden", "green"};
const std::vector<std::string> kFunction = {"a",  "the",   "is",       "on",   "with",
                                            "and", "near", "of",       "in",   "sitting",
                                            "standing", "next", "to", "photo", "there"};

const std::vector<std::string>& theme_of(const SceneWorld& sw, const std::string& object) {
  for (const auto& t : sw.themes) {
    if (std::find(t.begin(), t.end(), object) != t.end()) return t;
  }
  return sw.themes.front();
}

// Zipf-like frequencies over list order, so that some contexts make a
// specific object likely.
std::string zipf_pick(Gen& g, const std::vector<std::string>& v, double exponent) {
  double total = 0.0;
  for (std::size_t r = 0; r < v.size(); ++r) total += 1.0 / std::pow(r + 1.0, exponent);
  double u = g.uniform(0.0, total);
  for (std::size_t r = 0; r < v.size(); ++r) {
    u -= 1.0 / std::pow(r + 1.0, exponent);
    if (u <= 0.0) return v[r];
  }
  return v.back();
}

}  // namespace

SceneWorld scene_world(const SceneSpec& spec) {
  Gen g(spec.seed);
  SceneWorld sw;
  sw.spec = spec;
  for (const auto& t : all_themes()) {
    const auto n = std::min<std::size_t>(t.size(), static_cast<std::size_t>(spec.objects_per_theme));
    sw.themes.emplace_back(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n));
  }
  std::vector<std::string> tokens = kFunction;
  tokens.insert(tokens.end(), kAttributes.begin(), kAttributes.end());
  for (const auto& theme : sw.themes) {
    for (const auto& o : theme) {
      tokens.push_back(o);
      sw.objects.push_back(o);
    }
  }
  Vocabulary vocab(tokens);
  auto id = [&](const std::string& t) { return *vocab.id_of(t); };

  auto pick = [&](const std::vector<std::string>& v) {
    return v[static_cast<std::size_t>(g.integer(0, static_cast<int>(v.size()) - 1))];
  };
  auto zipf = [&](const std::vector<std::string>& v) { return zipf_pick(g, v, spec.zipf); };
  std::vector<std::vector<TokenId>> sentences;
  for (int n = 0; n < 600; ++n) {
    const std::string o1 = zipf(sw.objects);
    const auto& theme = theme_of(sw, o1);
    const std::string o2 = g.coin(spec.same_theme) ? zipf(theme) : zipf(sw.objects);
    std::vector<std::string> s;
    if (g.coin(spec.list_share)) {
      const std::string o3 = g.coin(spec.same_theme) ? zipf(theme) : zipf(sw.objects);
      s = {"a", o1, o2, "and", o3};
    } else switch (g.integer(0, 4)) {
      case 0:
        s = {"a", "photo", "of", "a", o1};
        if (g.coin()) s.insert(s.begin() + 4, pick(kAttributes));
        break;
      case 1:
        s = {"a", o1, "is", "on", "the", o2};
        break;
      case 2:
        s = {"the", pick(kAttributes), o1, "is", "sitting", "next", "to", "a", o2};
        break;
      case 3:
        s = {"there", "is", "a", o1, "and", "a", o2};
        break;
      default:
        s = {"a", o1, "standing", "near", "the", pick(kAttributes), o2, "in", "the", pick(theme)};
        break;
    }
    std::vector<TokenId> ids;
    for (const auto& t : s) ids.push_back(id(t));
    sentences.push_back(std::move(ids));
  }

  const int dim = 24;
  EmbeddingTable emb(tokens.size(), dim);
  for (const auto& t : kFunction) {
    auto v = g.unit(dim);
    for (auto& x : v) x *= 0.3;
    emb.set(id(t), v);
  }
  for (const auto& t : kAttributes) {
    auto v = g.unit(dim);
    for (auto& x : v) x *= 0.6;
    emb.set(id(t), v);
  }
  for (const auto& theme : sw.themes) {
    const auto centroid = g.unit(dim);
    for (const auto& o : theme) {
      auto noise = g.unit(dim);
      std::vector<double> v(dim);
      for (int i = 0; i < dim; ++i) v[i] = centroid[i] + 0.8 * noise[i];
      emb.set(id(o), v);
    }
  }
  EmbeddingTable mm = emb;
  sw.world = make_world(std::move(tokens), std::move(sentences), std::move(emb), std::move(mm),
                        spec.order);
  return sw;
}

SceneSpec sharp_scene_spec(std::uint64_t seed) {
  SceneSpec s;
  s.zipf = 0.0;
  s.same_theme = 0.9;
  s.list_share = 0.8;
  s.objects_per_theme = 2;
  s.seed = seed;
  return s;
}

std::vector<std::string> hidden_description(const SceneWorld& w, std::uint64_t seed,
                                            std::size_t size) {
  Gen g(seed * 7919 + 17);
  const double exponent = w.spec.common_descriptions ? w.spec.zipf : 0.0;
  const auto& theme = w.themes[static_cast<std::size_t>(g.integer(0, 4))];
  std::vector<std::string> out;
  const std::size_t cap = std::min(size, w.objects.size());
  while (out.size() < cap) {
    const std::string o =
        g.coin(0.7) ? zipf_pick(g, theme, exponent) : zipf_pick(g, w.objects, exponent);
    if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
  }
  return out;
}

World forcing_world() {
  std::vector<std::string> tokens = {"the", "dog", "sat", "on", "mat", "ran", "a", "cat"};
  Vocabulary vocab(tokens);
  const std::vector<std::string> corpus = {
      "the dog sat on the mat", "the dog ran", "a cat sat on a mat", "the mat",
      "a dog ran on the mat",
  };
  std::vector<std::vector<TokenId>> sentences;
  for (const auto& line : corpus) sentences.push_back(vocab.encode(line));
  const auto n = tokens.size();
  return make_world(std::move(tokens), std::move(sentences), one_hot_table(n), one_hot_table(n));
}

ToyFiles write_scene_files(const std::filesystem::path& dir) {
  const SceneWorld sw = scene_world();
  const World& w = sw.world;
  ToyFiles f;
  f.dir = dir;
  f.corpus = dir / "corpus.txt";
  f.emb = dir / "emb.txt";
  f.control_vec = dir / "control.vec";
  std::ostringstream corpus;
  for (const auto& s : w.sentences) corpus << w.vocab->decode(s) << '\n';
  write_file(f.corpus, corpus.str());
  write_embedding_table(f.emb, *w.emb, *w.vocab);
  f.description = hidden_description(sw, 3, 4);
  std::vector<TokenId> ids;
  for (const auto& t : f.description) ids.push_back(w.id(t));
  std::ostringstream vec;
  for (double x : toy_embed_text(ids, *w.mm)) vec << format_double(x) << ' ';
  vec << '\n';
  write_file(f.control_vec, vec.str());
  return f;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("guidedgen_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace guidedgen::testing
