// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic fixtures shared by the unit and acceptance tests.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "guidedgen/embedding_table.hpp"
#include "guidedgen/ngram_lm.hpp"
#include "guidedgen/oracles.hpp"
#include "guidedgen/toy_oracles.hpp"
#include "guidedgen/types.hpp"
#include "guidedgen/vector_math.hpp"

namespace guidedgen::testing {

// Hand-rolled generators over the library RNG.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform01(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }
  bool coin(double p = 0.5) { return rng_.uniform01() < p; }
  double normal();
  std::vector<double> vec(std::size_t n, double lo, double hi);
  std::vector<double> gaussian(std::size_t n);
  std::vector<double> unit(std::size_t n);
  // Strictly positive entries summing to 1.
  std::vector<double> simplex(std::size_t n);
  std::vector<TokenId> ids(std::size_t n, int vocab_size);
  std::uint64_t bits() { return rng_.engine()(); }

 private:
  Rng rng_;
};

// A complete toy oracle set. The textual oracle and the LM representations
// share `emb`; the joint space uses `mm`.
struct World {
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<std::vector<TokenId>> sentences;
  std::shared_ptr<const EmbeddingTable> emb;
  std::shared_ptr<const EmbeddingTable> mm;
  std::shared_ptr<const NGramLM> ngram;
  std::shared_ptr<const ToyBaseLM> lm;
  std::shared_ptr<const TableTextualOracle> textual;
  std::shared_ptr<const ToyMultimodalOracle> multimodal;

  Oracles view() const { return {lm.get(), textual.get(), multimodal.get()}; }
  TokenId id(const std::string& token) const;
};

World make_world(std::vector<std::string> tokens,
                 std::vector<std::vector<TokenId>> sentences,
                 EmbeddingTable emb, EmbeddingTable mm, int order = 2,
                 double smoothing = 0.5);

// Random vocabulary "w0".."w{V-1}", a Markov corpus with a few preferred
// successors per token, and Gaussian unit embeddings.
World random_world(std::uint64_t seed, int vocab_size, int dim, int order = 2,
                   int corpus_tokens = 400);

// Scene-description world: object nouns, attributes and function words in a
// small grammar; embeddings cluster objects by theme. Controls are built from
// hidden descriptions (lists of object nouns).
struct SceneSpec {
  double zipf = 1.0;        // object frequency exponent
  double same_theme = 0.75;  // P(second object shares the first's theme)
  int order = 2;
  double list_share = 0.0;  // fraction of "o1 o2 o3" list captions
  int objects_per_theme = 6;
  bool common_descriptions = false;  // descriptions follow object frequency
  std::uint64_t seed = 20260501;
};
struct SceneWorld {
  World world;
  SceneSpec spec;
  std::vector<std::string> objects;  // frequency rank order
  std::vector<std::vector<std::string>> themes;
};
SceneWorld scene_world(const SceneSpec& spec = {});
// Ten objects, mostly list captions, uniform object frequencies. Keyword
// probabilities here are high enough for the alpha cap to bind.
SceneSpec sharp_scene_spec(std::uint64_t seed);
std::vector<std::string> hidden_description(const SceneWorld& w, std::uint64_t seed,
                                            std::size_t size);

// One-hot embeddings; "cat" is rare after the prompt "the".
World forcing_world();

EmbeddingTable random_table(Gen& g, std::size_t vocab_size, int dim);
EmbeddingTable one_hot_table(std::size_t vocab_size);

// Files for CLI tests.
struct ToyFiles {
  std::filesystem::path dir;
  std::filesystem::path corpus;
  std::filesystem::path emb;
  std::filesystem::path control_vec;
  std::vector<std::string> description;
};
ToyFiles write_scene_files(const std::filesystem::path& dir);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace guidedgen::testing
