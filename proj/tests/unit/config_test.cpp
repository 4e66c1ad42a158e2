// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/config.hpp"

#include <gtest/gtest.h>

#include "fixtures.hpp"

namespace guidedgen {
namespace {

Vocabulary numbered_vocab(int n) {
  std::vector<std::string> t;
  for (int i = 0; i < n; ++i) t.push_back("t" + std::to_string(i));
  return Vocabulary(t);
}

std::string error_of(const DecoderConfig& cfg, const Vocabulary& v,
                     const TextualControl& t = {}) {
  try {
    validate_config(cfg, v, t);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(VocabularyTest, IdsFollowOrder) {
  Vocabulary v({"x", "y", "z"});
  EXPECT_EQ(v.size(), 3u);
  EXPECT_EQ(*v.id_of("z"), 2);
  EXPECT_EQ(v.token(1), "y");
  EXPECT_FALSE(v.id_of("w").has_value());
  EXPECT_EQ(v.encode("z x"), (std::vector<TokenId>{2, 0}));
  EXPECT_EQ(v.decode({1, 1}), "y y");
}

TEST(VocabularyTest, RejectsBadInventories) {
  EXPECT_THROW(Vocabulary({"x"}), ConfigError);
  EXPECT_THROW(Vocabulary({"x", "x"}), ConfigError);
  EXPECT_THROW(Vocabulary({"x", ""}), ConfigError);
  Vocabulary v({"x", "y"});
  EXPECT_THROW(v.encode("x q"), ConfigError);
  EXPECT_THROW(v.token(5), ConfigError);
}

TEST(VocabularyTest, HashDependsOnOrder) {
  EXPECT_EQ(Vocabulary({"a", "b"}).hash(), Vocabulary({"a", "b"}).hash());
  EXPECT_NE(Vocabulary({"a", "b"}).hash(), Vocabulary({"b", "a"}).hash());
  EXPECT_EQ(Vocabulary({"a", "b"}).hash_hex().size(), 16u);
}

TEST(ValidateConfigTest, CocoValuesAreValidOnLargeVocabulary) {
  DecoderConfig cfg;
  cfg.k = 45;
  cfg.eta = 0.10;
  cfg.lambda = 0.2;
  cfg.alpha_max = 2.5;
  cfg.beta_max = 1.0;
  EXPECT_EQ(error_of(cfg, numbered_vocab(1000)), "");
}

TEST(ValidateConfigTest, NamesTheViolatedInvariant) {
  const Vocabulary v = numbered_vocab(10);
  DecoderConfig cfg;
  cfg.k = 0;
  EXPECT_EQ(error_of(cfg, v), "k out of range");
  cfg.k = 11;
  EXPECT_EQ(error_of(cfg, v), "k out of range");
  cfg = {};
  cfg.k = 5;
  cfg.eta = 1.5;
  EXPECT_EQ(error_of(cfg, v), "eta out of range");
  cfg.eta = 0.1;
  cfg.lambda = 0.0;
  EXPECT_EQ(error_of(cfg, v), "lambda out of range");
  cfg.lambda = 0.2;
  cfg.alpha_max = -1;
  EXPECT_EQ(error_of(cfg, v), "alpha_max out of range");
  cfg.alpha_max = 1;
  cfg.max_len = 0;
  EXPECT_EQ(error_of(cfg, v), "max_len out of range");
  cfg.max_len = 4;
  cfg.eos_token = "nope";
  EXPECT_EQ(error_of(cfg, v), "eos_token 'nope' is not in the vocabulary");
  cfg.eos_token = "t1";
  EXPECT_EQ(error_of(cfg, v, {{"t2", "zz"}}), "keyword 'zz' is not in the vocabulary");
  EXPECT_EQ(error_of(cfg, v, {{"t2", "t2"}}), "duplicate keyword 't2'");
  cfg.n_hat = 3;
  EXPECT_EQ(error_of(cfg, v, {{"t2", "t3"}}), "n_hat out of range");
}

TEST(ValidateConfigTest, ResolvesAllAndIsIdempotent) {
  const Vocabulary v = numbered_vocab(10);
  DecoderConfig cfg;
  cfg.k = 4;
  const TextualControl t{{"t1", "t2", "t3"}};
  const DecoderConfig once = validate_config(cfg, v, t);
  ASSERT_TRUE(once.n_hat.has_value());
  EXPECT_EQ(*once.n_hat, 3);
  EXPECT_EQ(validate_config(once, v, t), once);
}

TEST(ConfigTextTest, RoundTripsThroughSerialization) {
  testing::Gen g(11);
  for (int i = 0; i < 50; ++i) {
    DecoderConfig cfg;
    cfg.k = g.integer(1, 100);
    cfg.eta = g.uniform(0, 1);
    cfg.lambda = g.uniform(0.01, 1);
    cfg.alpha_max = g.uniform(0, 10);
    cfg.beta_max = g.uniform(0, 10);
    if (g.coin()) cfg.n_hat = g.integer(1, 5);
    cfg.selection = static_cast<SelectionMode>(g.integer(0, 2));
    cfg.seed = g.bits();
    cfg.eos_token = g.coin() ? "." : "";
    cfg.dynamic_alpha = g.coin();
    cfg.alpha = g.normal();
    cfg.floor_similarity = g.coin();
    const std::string text = serialize_config(cfg);
    EXPECT_EQ(parse_config(text), cfg);
    EXPECT_EQ(serialize_config(parse_config(text)), text);
  }
}

TEST(ConfigTextTest, SkipsCommentsAndRejectsBadKeys) {
  const DecoderConfig cfg = parse_config("# note\n\nk = 7\nselection=mp\nn_hat=all\n");
  EXPECT_EQ(cfg.k, 7);
  EXPECT_EQ(cfg.selection, SelectionMode::kMeanPooling);
  EXPECT_FALSE(cfg.n_hat.has_value());
  EXPECT_THROW(parse_config("bogus=1\n"), ConfigError);
  EXPECT_THROW(parse_config("k=1\nk=2\n"), ConfigError);
  EXPECT_THROW(parse_config("k=abc\n"), ConfigError);
  EXPECT_THROW(parse_config("dynamic_alpha=maybe\n"), ConfigError);
  EXPECT_THROW(parse_config("just a line\n"), ConfigError);
}

TEST(ConfigTextTest, LayersOverExistingValues) {
  DecoderConfig cfg = parse_config("k=7\neta=0.5\n");
  apply_config_text(cfg, "k=9\n");
  EXPECT_EQ(cfg.k, 9);
  EXPECT_DOUBLE_EQ(cfg.eta, 0.5);
}

TEST(ConfigTextTest, SelectionNames) {
  EXPECT_EQ(parse_selection_mode("sr"), SelectionMode::kStepwiseRandom);
  EXPECT_EQ(parse_selection_mode("WM"), SelectionMode::kWordwiseMax);
  EXPECT_EQ(to_string(SelectionMode::kMeanPooling), "MP");
  EXPECT_THROW(parse_selection_mode("max"), ConfigError);
}

TEST(PresetTest, TableValues) {
  const DecoderConfig coco = load_preset("coco");
  EXPECT_EQ(coco.k, 45);
  EXPECT_DOUBLE_EQ(coco.eta, 0.10);
  EXPECT_DOUBLE_EQ(coco.alpha_max, 2.5);
  EXPECT_DOUBLE_EQ(coco.beta_max, 1.0);
  const DecoderConfig flickr = load_preset("flickr30k");
  EXPECT_EQ(flickr.k, 25);
  EXPECT_DOUBLE_EQ(flickr.eta, 0.10);
  EXPECT_DOUBLE_EQ(flickr.alpha_max, 2.0);
  EXPECT_DOUBLE_EQ(flickr.beta_max, 0.5);
  const DecoderConfig news = load_preset("visnews");
  EXPECT_EQ(news.k, 5);
  EXPECT_DOUBLE_EQ(news.eta, 0.65);
  EXPECT_DOUBLE_EQ(news.alpha_max, 8.0);
  EXPECT_DOUBLE_EQ(news.beta_max, 0.5);
  EXPECT_EQ(news.n_hat, 2);
}

TEST(PresetTest, EveryPresetRoundTripsByteIdentically) {
  const auto names = preset_names();
  EXPECT_GE(names.size(), 3u);
  for (const auto& name : names) {
    const DecoderConfig cfg = load_preset(name);
    const std::string text = serialize_config(cfg);
    EXPECT_EQ(serialize_config(parse_config(text)), text) << name;
  }
  EXPECT_THROW(load_preset("imagenet"), ConfigError);
}

}  // namespace
}  // namespace guidedgen
