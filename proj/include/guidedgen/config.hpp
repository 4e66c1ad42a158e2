// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guidedgen/types.hpp"

namespace guidedgen {

// How the per-step control vector is drawn from the N x V keyword
// similarity matrix.
enum class SelectionMode {
  kStepwiseRandom,  // SR: one uniformly sampled keyword row per step
  kMeanPooling,     // MP: column-wise mean
  kWordwiseMax,     // WM: column-wise max
};

std::string_view to_string(SelectionMode mode);
SelectionMode parse_selection_mode(std::string_view text);

struct DecoderConfig {
  // Candidate-set size.
  int k = 45;
  // Contrastive-search mixing weight between confidence and the
  // degeneration penalty.
  double eta = 0.10;
  // Amplifying threshold for the dynamic weights.
  double lambda = 0.2;
  // Upper bounds of the dynamic textual/visual weights.
  double alpha_max = 2.5;
  double beta_max = 1.0;
  // Number of keywords averaged into D_T; nullopt means "all".
  std::optional<int> n_hat;
  SelectionMode selection = SelectionMode::kWordwiseMax;
  int max_len = 16;
  std::uint64_t seed = 0;
  // Empty: no terminator, max_len is the only stop.
  std::string eos_token;
  // Prepended when the prompt is empty.
  std::string bos_token;

  // Static-weight mode. When dynamic_alpha (dynamic_beta) is false the
  // textual (visual) weight is the constant alpha (beta) every step.
  bool dynamic_alpha = true;
  bool dynamic_beta = true;
  double alpha = 1.0;
  double beta = 1.0;

  // Experiment flags, all off by default.
  bool beta_double_apply = false;       // literal S_SimCTG + beta_t * S_t
  bool allow_negative_weights = false;  // drop the lower clamp at 0
  bool floor_similarity = false;        // floor keyword cosines at 0

  bool operator==(const DecoderConfig&) const = default;
};

// Checks every invariant against the vocabulary and textual control and
// returns the config with n_hat resolved. Throws ConfigError naming the first
// violated invariant. Idempotent.
DecoderConfig validate_config(const DecoderConfig& cfg, const Vocabulary& vocab,
                              const TextualControl& tctl);

// Flat key=value text, one field per line in declaration order, doubles in
// shortest round-trip form.
std::string serialize_config(const DecoderConfig& cfg);

// Parses key=value text over the defaults. Blank lines and '#' comments are
// skipped; unknown or duplicated keys are errors.
DecoderConfig parse_config(std::string_view text);
// Same syntax, layered over an existing config.
void apply_config_text(DecoderConfig& cfg, std::string_view text);
DecoderConfig load_config_file(const std::filesystem::path& path);

// Sets one field from its textual value; used by the parser and the CLI.
void set_config_field(DecoderConfig& cfg, std::string_view key,
                      std::string_view value);
const std::vector<std::string>& config_field_names();

// Preset files live in a directory of <name>.cfg files. The directory is
// taken from $GUIDEDGEN_PRESET_DIR when set, else the source tree.
std::filesystem::path preset_directory();
std::vector<std::string> preset_names();
DecoderConfig load_preset(std::string_view name);

std::string format_double(double value);

}  // namespace guidedgen
