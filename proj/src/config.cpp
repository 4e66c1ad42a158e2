// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#ifndef GUIDEDGEN_PRESET_DIR
#define GUIDEDGEN_PRESET_DIR "presets"
#endif

namespace guidedgen {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ConfigError(std::string(key) + ": invalid number '" + std::string(value) + "'");
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view value) {
  Int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(std::string(key) + ": invalid integer '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(std::string(key) + ": invalid boolean '" + std::string(value) + "'");
}

}  // namespace

std::string_view to_string(SelectionMode mode) {
  switch (mode) {
    case SelectionMode::kStepwiseRandom: return "SR";
    case SelectionMode::kMeanPooling: return "MP";
    case SelectionMode::kWordwiseMax: return "WM";
  }
  return "WM";
}

SelectionMode parse_selection_mode(std::string_view text) {
  std::string up(text);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "SR") return SelectionMode::kStepwiseRandom;
  if (up == "MP") return SelectionMode::kMeanPooling;
  if (up == "WM") return SelectionMode::kWordwiseMax;
  throw ConfigError("selection: expected one of SR, MP, WM, got '" +
                    std::string(text) + "'");
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) return std::to_string(value);
  std::string s(buf, ptr);
  // Keep a decimal point so the value reads back as a real.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

DecoderConfig validate_config(const DecoderConfig& cfg, const Vocabulary& vocab,
                              const TextualControl& tctl) {
  const auto v = static_cast<long long>(vocab.size());
  if (cfg.k < 1 || cfg.k > v) throw ConfigError("k out of range");
  if (!(cfg.eta >= 0.0 && cfg.eta <= 1.0)) throw ConfigError("eta out of range");
  if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) {
    throw ConfigError("lambda out of range");
  }
  if (!(cfg.alpha_max >= 0.0) || !std::isfinite(cfg.alpha_max)) {
    throw ConfigError("alpha_max out of range");
  }
  if (!(cfg.beta_max >= 0.0) || !std::isfinite(cfg.beta_max)) {
    throw ConfigError("beta_max out of range");
  }
  if (!std::isfinite(cfg.alpha) || !std::isfinite(cfg.beta)) {
    throw ConfigError("static alpha/beta must be finite");
  }
  const int n = static_cast<int>(tctl.keywords.size());
  const int n_cap = std::max(n, 1);
  DecoderConfig out = cfg;
  if (!out.n_hat) out.n_hat = n_cap;
  if (*out.n_hat < 1 || *out.n_hat > n_cap) throw ConfigError("n_hat out of range");
  if (cfg.max_len < 1) throw ConfigError("max_len out of range");
  if (!cfg.eos_token.empty() && !vocab.contains(cfg.eos_token)) {
    throw ConfigError("eos_token '" + cfg.eos_token + "' is not in the vocabulary");
  }
  if (!cfg.bos_token.empty() && !vocab.contains(cfg.bos_token)) {
    throw ConfigError("bos_token '" + cfg.bos_token + "' is not in the vocabulary");
  }
  std::set<std::string_view> seen;
  for (const auto& kw : tctl.keywords) {
    if (!seen.insert(kw).second) throw ConfigError("duplicate keyword '" + kw + "'");
    if (!vocab.contains(kw)) {
      throw ConfigError("keyword '" + kw + "' is not in the vocabulary");
    }
  }
  return out;
}

const std::vector<std::string>& config_field_names() {
  static const std::vector<std::string> names = {
      "k",          "eta",       "lambda",        "alpha_max",
      "beta_max",   "n_hat",     "selection",     "max_len",
      "seed",       "eos_token", "bos_token",     "dynamic_alpha",
      "dynamic_beta", "alpha",   "beta",          "beta_double_apply",
      "allow_negative_weights",  "floor_similarity"};
  return names;
}

void set_config_field(DecoderConfig& cfg, std::string_view key,
                      std::string_view value) {
  if (key == "k") {
    cfg.k = parse_int<int>(key, value);
  } else if (key == "eta") {
    cfg.eta = parse_double(key, value);
  } else if (key == "lambda") {
    cfg.lambda = parse_double(key, value);
  } else if (key == "alpha_max") {
    cfg.alpha_max = parse_double(key, value);
  } else if (key == "beta_max") {
    cfg.beta_max = parse_double(key, value);
  } else if (key == "n_hat") {
    if (value == "all") {
      cfg.n_hat.reset();
    } else {
      cfg.n_hat = parse_int<int>(key, value);
    }
  } else if (key == "selection") {
    cfg.selection = parse_selection_mode(value);
  } else if (key == "max_len") {
    cfg.max_len = parse_int<int>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_int<std::uint64_t>(key, value);
  } else if (key == "eos_token") {
    cfg.eos_token = std::string(value);
  } else if (key == "bos_token") {
    cfg.bos_token = std::string(value);
  } else if (key == "dynamic_alpha") {
    cfg.dynamic_alpha = parse_bool(key, value);
  } else if (key == "dynamic_beta") {
    cfg.dynamic_beta = parse_bool(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, value);
  } else if (key == "beta") {
    cfg.beta = parse_double(key, value);
  } else if (key == "beta_double_apply") {
    cfg.beta_double_apply = parse_bool(key, value);
  } else if (key == "allow_negative_weights") {
    cfg.allow_negative_weights = parse_bool(key, value);
  } else if (key == "floor_similarity") {
    cfg.floor_similarity = parse_bool(key, value);
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::string serialize_config(const DecoderConfig& cfg) {
  auto b = [](bool x) { return x ? "true" : "false"; };
  std::ostringstream os;
  os << "k=" << cfg.k << '\n'
     << "eta=" << format_double(cfg.eta) << '\n'
     << "lambda=" << format_double(cfg.lambda) << '\n'
     << "alpha_max=" << format_double(cfg.alpha_max) << '\n'
     << "beta_max=" << format_double(cfg.beta_max) << '\n'
     << "n_hat=" << (cfg.n_hat ? std::to_string(*cfg.n_hat) : std::string("all")) << '\n'
     << "selection=" << to_string(cfg.selection) << '\n'
     << "max_len=" << cfg.max_len << '\n'
     << "seed=" << cfg.seed << '\n'
     << "eos_token=" << cfg.eos_token << '\n'
     << "bos_token=" << cfg.bos_token << '\n'
     << "dynamic_alpha=" << b(cfg.dynamic_alpha) << '\n'
     << "dynamic_beta=" << b(cfg.dynamic_beta) << '\n'
     << "alpha=" << format_double(cfg.alpha) << '\n'
     << "beta=" << format_double(cfg.beta) << '\n'
     << "beta_double_apply=" << b(cfg.beta_double_apply) << '\n'
     << "allow_negative_weights=" << b(cfg.allow_negative_weights) << '\n'
     << "floor_similarity=" << b(cfg.floor_similarity) << '\n';
  return os.str();
}

DecoderConfig parse_config(std::string_view text) {
  DecoderConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

void apply_config_text(DecoderConfig& cfg, std::string_view text) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("duplicate config key '" + std::string(key) + "'");
    }
    set_config_field(cfg, key, value);
  }
}

DecoderConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::filesystem::path preset_directory() {
  if (const char* env = std::getenv("GUIDEDGEN_PRESET_DIR"); env && *env) {
    return env;
  }
  return GUIDEDGEN_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(preset_directory(), ec)) {
    if (entry.path().extension() == ".cfg") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

DecoderConfig load_preset(std::string_view name) {
  const auto path = preset_directory() / (std::string(name) + ".cfg");
  if (!std::filesystem::exists(path)) {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return load_config_file(path);
}

}  // namespace guidedgen
