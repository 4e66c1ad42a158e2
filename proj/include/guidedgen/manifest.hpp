// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "guidedgen/config.hpp"
#include "guidedgen/decoder.hpp"
#include "guidedgen/embedding_table.hpp"
#include "guidedgen/oracles.hpp"
#include "guidedgen/types.hpp"

namespace guidedgen {

// Where the oracles come from. Toy mode trains an n-gram LM on `corpus` and
// uses `emb` for the textual oracle and representations, `mm_emb` (or `emb`)
// for the joint space. Bridge mode takes the LM and joint space from a
// server and keeps `emb` as the textual oracle.
struct OracleSpec {
  std::string corpus;
  std::string vocab;  // one token per line; defaults to the corpus inventory
  std::string emb;
  std::string mm_emb;
  int order = 2;
  double smoothing = 0.5;
  std::string bridge;  // endpoint; empty = toy mode

  nlohmann::json to_json(bool with_hashes) const;
  static OracleSpec from_json(const nlohmann::json& j);
};

// Owns everything an OracleSpec resolves to.
struct OracleBundle {
  std::shared_ptr<const Vocabulary> vocab;
  std::shared_ptr<const EmbeddingTable> emb;
  std::shared_ptr<const EmbeddingTable> mm_emb;
  std::shared_ptr<const BaseLM> lm;
  std::shared_ptr<const TextualOracle> textual;
  std::shared_ptr<const MultimodalOracle> multimodal;

  Oracles view() const { return {lm.get(), textual.get(), multimodal.get()}; }
};

// Throws OracleError for unreadable or malformed oracle sources and
// ConfigError for missing ones. extra_tokens (eos/bos) join a corpus-derived
// vocabulary.
OracleBundle load_oracles(const OracleSpec& spec,
                          const std::vector<std::string>& extra_tokens = {});

// Every input of a generate run, enough to replay it byte for byte.
struct RunManifest {
  DecoderConfig config;
  OracleSpec oracles;
  std::vector<std::string> prompts;
  std::vector<std::string> keywords;
  VisualControl control;
  std::string output;      // empty = stdout
  std::string trace;       // empty = no trace
  std::string sim_cache;   // empty = none
  int jobs = 1;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

void write_manifest(const std::filesystem::path& path, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& path);

// Throws ConfigError when a file recorded in the manifest changed since.
void verify_manifest_sources(const nlohmann::json& manifest_json);

struct RunOutput {
  std::vector<GenerationResult> results;  // one per prompt
  std::string text;                       // one line per prompt
  std::string trace_jsonl;
};

// Resolves oracles and controls, runs one session per prompt (fanned over
// `jobs` threads) and renders output/trace text. Writes nothing.
RunOutput execute_run(const RunManifest& m);

std::string file_fingerprint(const std::filesystem::path& path);
std::vector<double> read_vector_file(const std::filesystem::path& path);

}  // namespace guidedgen
