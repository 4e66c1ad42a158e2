// Copyright 2026 The guidedgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "guidedgen/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "guidedgen/bridge.hpp"
#include "guidedgen/config.hpp"
#include "guidedgen/manifest.hpp"
#include "guidedgen/metrics.hpp"
#include "guidedgen/textual_guidance.hpp"

namespace guidedgen::cli {
namespace {

// Flag name -> DecoderConfig field.
const std::vector<std::pair<std::string, std::string>>& config_flags() {
  static const std::vector<std::pair<std::string, std::string>> flags = {
      {"--k", "k"},
      {"--eta", "eta"},
      {"--lambda", "lambda"},
      {"--alpha-max", "alpha_max"},
      {"--beta-max", "beta_max"},
      {"--n-hat,--n", "n_hat"},
      {"--selection", "selection"},
      {"--max-len", "max_len"},
      {"--seed", "seed"},
      {"--eos-token", "eos_token"},
      {"--bos-token", "bos_token"},
      {"--alpha", "alpha"},
      {"--beta", "beta"},
  };
  return flags;
}

struct OracleFlags {
  OracleSpec spec;

  void add(CLI::App& app) {
    app.add_option("--corpus", spec.corpus, "Training corpus for the toy n-gram LM");
    app.add_option("--vocab", spec.vocab, "Vocabulary file, one token per line");
    app.add_option("--emb", spec.emb, "Word-embedding table (textual oracle)");
    app.add_option("--mm-emb", spec.mm_emb,
                   "Embedding table for the toy joint space (defaults to --emb)");
    app.add_option("--order", spec.order, "Toy n-gram order")->capture_default_str();
    app.add_option("--smoothing", spec.smoothing, "Add-k smoothing constant")
        ->capture_default_str();
    app.add_option("--bridge", spec.bridge,
                   "Oracle bridge endpoint (exec:<cmd>, tcp://host:port); "
                   "$ZEROGEN_BRIDGE overrides");
  }

  void resolve_env() {
    if (const char* env = std::getenv("ZEROGEN_BRIDGE"); env && *env) spec.bridge = env;
  }
};

struct ControlFlags {
  std::string keywords;
  std::string control_vec;
  std::string control_ref;

  void add(CLI::App& app) {
    app.add_option("--keywords", keywords, "Comma-separated textual control keywords");
    auto* vec = app.add_option("--control-vec", control_vec,
                               "File of whitespace-separated floats (visual control)");
    auto* ref = app.add_option("--control-ref", control_ref,
                               "Control reference resolved by the multimodal oracle");
    vec->excludes(ref);
  }

  std::vector<std::string> keyword_list() const { return split_list(keywords, ','); }

  VisualControl control() const {
    if (!control_vec.empty()) return VisualControl::from_vector(read_vector_file(control_vec));
    if (!control_ref.empty()) return VisualControl::from_ref(control_ref);
    return {};
  }
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

int fail(std::ostream& err, int code, const std::string& component, const std::string& msg) {
  err << "guidedgen: " << component << ": " << msg << '\n';
  return code;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const BridgeError& e) {
    return fail(err, kExitOracle, "bridge error", e.what());
  } catch (const OracleError& e) {
    return fail(err, kExitOracle, "oracle error", e.what());
  } catch (const ConfigError& e) {
    return fail(err, kExitConfig, "config error", e.what());
  } catch (const FormatError& e) {
    return fail(err, kExitConfig, "input error", e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(err, kExitConfig, "input error", e.what());
  } catch (const std::exception& e) {
    return fail(err, kExitConfig, "error", e.what());
  }
}

int write_run(const RunManifest& m, const std::string& manifest_path, std::ostream& out) {
  RunOutput result = execute_run(m);
  write_text(m.output, result.text, out);
  if (!m.trace.empty()) write_text(m.trace, result.trace_jsonl, out);
  if (!manifest_path.empty()) write_manifest(manifest_path, m);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Guided decoding with keyword and control-embedding steering", "guidedgen"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate text with the guided decoder");
  std::string config_path;
  std::string preset;
  std::vector<std::string> prompts;
  std::string prompts_file;
  std::string output;
  std::string trace;
  std::string manifest_path;
  std::string sim_cache;
  std::vector<std::string> sets;
  int jobs = 1;
  std::map<std::string, std::string> overrides;
  OracleFlags gen_oracles;
  ControlFlags gen_controls;
  gen->add_option("--config", config_path, "key=value config file");
  gen->add_option("--preset", preset, "Named parameter preset (coco, flickr30k, visnews, ...)");
  gen->add_option("--prompt", prompts, "Prompt text; repeat for several prompts");
  gen->add_option("--prompts-file", prompts_file, "One prompt per line");
  for (const auto& [flag, field] : config_flags()) {
    gen->add_option(flag, overrides[field], "Config field " + field);
  }
  gen->add_option("--set", sets, "Any config field as key=value");
  gen->add_option("--trace", trace, "Write the per-step trace (JSONL) here");
  gen->add_option("--output,-o", output, "Write generated text here (default stdout)");
  gen->add_option("--manifest", manifest_path, "Write the run manifest here");
  gen->add_option("--sim-cache", sim_cache,
                  "Binary similarity-matrix cache (read if present, else written)");
  gen->add_option("--jobs", jobs, "Parallel sessions across prompts")->check(CLI::PositiveNumber);
  gen_oracles.add(*gen);
  gen_controls.add(*gen);

  // eval
  auto* ev = app.add_subcommand("eval", "Score generated text");
  std::string eval_input;
  std::string eval_output;
  bool eval_json = false;
  OracleFlags eval_oracles;
  ControlFlags eval_controls;
  ev->add_option("--input", eval_input, "Generated text, one sequence per line")->required();
  ev->add_flag("--json", eval_json, "Print the report as JSON");
  ev->add_option("--output,-o", eval_output, "Also write the JSON report here");
  eval_oracles.add(*ev);
  eval_controls.add(*ev);

  // precompute
  auto* pre = app.add_subcommand("precompute", "Write the keyword similarity cache");
  std::string pre_out;
  bool pre_floor = false;
  OracleFlags pre_oracles;
  ControlFlags pre_controls;
  pre->add_option("--out", pre_out, "Cache file to write")->required();
  pre->add_flag("--floor-similarity", pre_floor, "Floor negative cosines at 0");
  pre_oracles.add(*pre);
  pre_controls.add(*pre);

  // replay
  auto* rep = app.add_subcommand("replay", "Re-run a recorded manifest");
  std::string rep_manifest;
  std::string rep_output;
  std::string rep_trace;
  rep->add_option("--manifest", rep_manifest, "Manifest written by generate")->required();
  rep->add_option("--output,-o", rep_output, "Override the output path");
  rep->add_option("--trace", rep_trace, "Override the trace path");

  auto* presets = app.add_subcommand("presets", "List presets or print one");
  std::string show_preset;
  presets->add_option("name", show_preset, "Preset to print");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kExitOk;
    return fail(err, kExitConfig, "usage error", e.what());
  }

  if (*gen) {
    return guarded(err, [&] {
      RunManifest m;
      if (!preset.empty()) m.config = load_preset(preset);
      if (!config_path.empty()) {
        // A config file layers over the preset: only its keys change.
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw ConfigError("cannot read config file " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        apply_config_text(m.config, ss.str());
      }
      for (const auto& [field, value] : overrides) {
        if (!value.empty()) set_config_field(m.config, field, value);
      }
      for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value");
        set_config_field(m.config, kv.substr(0, eq), kv.substr(eq + 1));
      }
      gen_oracles.resolve_env();
      m.oracles = gen_oracles.spec;
      m.prompts = prompts;
      if (!prompts_file.empty()) {
        std::ifstream in(prompts_file, std::ios::binary);
        if (!in) throw ConfigError("cannot read prompts file " + prompts_file);
        for (std::string line; std::getline(in, line);) {
          if (!split_whitespace(line).empty()) m.prompts.push_back(line);
        }
      }
      m.keywords = gen_controls.keyword_list();
      m.control = gen_controls.control();
      m.output = output;
      m.trace = trace;
      m.sim_cache = sim_cache;
      m.jobs = jobs;
      std::string mpath = manifest_path;
      if (mpath.empty() && !output.empty() && output != "-") mpath = output + ".manifest.json";
      return write_run(m, mpath, out);
    });
  }

  if (*rep) {
    return guarded(err, [&] {
      RunManifest m = read_manifest(rep_manifest);
      if (!rep_output.empty()) m.output = rep_output;
      if (!rep_trace.empty()) m.trace = rep_trace;
      return write_run(m, "", out);
    });
  }

  if (*ev) {
    return guarded(err, [&] {
      std::ifstream in(eval_input, std::ios::binary);
      if (!in) throw ConfigError("cannot read input " + eval_input);
      std::vector<std::string> lines;
      for (std::string line; std::getline(in, line);) {
        if (!split_whitespace(line).empty()) lines.push_back(line);
      }
      if (lines.empty()) throw ConfigError("input " + eval_input + " has no sequences");
      eval_oracles.resolve_env();
      const OracleBundle bundle = load_oracles(eval_oracles.spec);
      std::vector<std::vector<TokenId>> seqs;
      for (const auto& line : lines) seqs.push_back(bundle.vocab->encode(line));
      std::vector<double> control_embedding;
      const VisualControl vctl = eval_controls.control();
      if (!vctl.empty()) control_embedding = bundle.multimodal->embed_control(vctl);
      const EvalReport report =
          evaluate(seqs, *bundle.vocab, eval_controls.keyword_list(), *bundle.lm,
                   bundle.multimodal.get(), control_embedding);
      if (eval_json) {
        out << report.to_json().dump() << '\n';
      } else {
        out << report.to_table();
      }
      if (!eval_output.empty()) write_text(eval_output, report.to_json().dump() + "\n", out);
      return kExitOk;
    });
  }

  if (*pre) {
    return guarded(err, [&] {
      pre_oracles.resolve_env();
      // The toy oracles are enough: only the textual side is used.
      OracleSpec spec = pre_oracles.spec;
      spec.bridge.clear();
      if (spec.emb.empty()) throw ConfigError("precompute needs --emb");
      const OracleBundle bundle = load_oracles(spec);
      TextualControl tctl{pre_controls.keyword_list()};
      if (!tctl.enabled()) throw ConfigError("precompute needs --keywords");
      for (const auto& kw : tctl.keywords) {
        if (!bundle.vocab->contains(kw)) {
          throw ConfigError("keyword '" + kw + "' is not in the vocabulary");
        }
      }
      const auto matrix = build_similarity_matrix(*bundle.vocab, tctl, *bundle.textual, pre_floor);
      write_similarity_cache(pre_out, matrix,
                             similarity_key_hash(*bundle.vocab, tctl, *bundle.textual, pre_floor));
      out << "wrote " << matrix.rows() << " x " << matrix.cols() << " similarities to "
          << pre_out << '\n';
      return kExitOk;
    });
  }

  if (*presets) {
    return guarded(err, [&] {
      if (show_preset.empty()) {
        for (const auto& name : preset_names()) out << name << '\n';
      } else {
        out << serialize_config(load_preset(show_preset));
      }
      return kExitOk;
    });
  }
  return kExitConfig;
}

}  // namespace guidedgen::cli
