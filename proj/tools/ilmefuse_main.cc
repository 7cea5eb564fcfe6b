// Copyright 2026 The ilmefuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_util.h"
#include "commands.h"
#include "ilmefuse/common.h"
#include "json.hpp"

namespace {

struct SubcommandArgs {
  std::string config_path;
  std::vector<std::string> overrides;
};

// Registers the config plumbing every subcommand shares: an optional JSON
// config file plus repeatable dotted-key overrides.
void AddCommon(CLI::App* cmd, SubcommandArgs* args) {
  cmd->add_option("-c,--config", args->config_path, "JSON config file");
  cmd->add_option("-s,--set", args->overrides,
                  "dotted-key override, e.g. --set fusion.beam_size=4 (repeatable)");
}

// Mirrors a flag into a dotted-key override so dedicated flags and --set
// flow through one code path (flags win: they are applied last).
void MirrorOption(CLI::App* cmd, SubcommandArgs* args, const std::string& flag,
                  const std::string& dotted, const std::string& help) {
  cmd->add_option_function<std::string>(
      flag,
      [args, dotted](const std::string& value) { args->overrides.push_back(dotted + "=" + value); },
      help);
}

int Dispatch(const SubcommandArgs& args,
             const std::function<void(const nlohmann::json&)>& command) {
  const nlohmann::json config = ilmefuse::cli::ResolveConfig(args.config_path, args.overrides);
  command(config);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ilmefuse: code-switching ASR with internal-LM-estimation fusion on synthetic data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ilmefuse 0.1.0");

  using ilmefuse::cli::CmdDecode;
  using ilmefuse::cli::CmdDiagLoss;
  using ilmefuse::cli::CmdEval;
  using ilmefuse::cli::CmdGenData;
  using ilmefuse::cli::CmdSweepIlmWeight;
  using ilmefuse::cli::CmdTrainAsr;
  using ilmefuse::cli::CmdTrainIlm;
  using ilmefuse::cli::CmdTrainLm;

  struct Entry {
    SubcommandArgs* args;
    std::function<void(const nlohmann::json&)> run;
  };
  std::vector<std::pair<CLI::App*, Entry>> entries;
  std::vector<std::unique_ptr<SubcommandArgs>> arg_storage;

  auto add = [&](const char* name, const char* help,
                 std::function<void(const nlohmann::json&)> run) {
    CLI::App* cmd = app.add_subcommand(name, help);
    arg_storage.push_back(std::make_unique<SubcommandArgs>());
    SubcommandArgs* args = arg_storage.back().get();
    AddCommon(cmd, args);
    entries.emplace_back(cmd, Entry{args, std::move(run)});
    return std::make_pair(cmd, args);
  };

  add("gen-data", "generate a synthetic code-switching dataset", CmdGenData);
  add("train-asr", "train the joint CTC/attention ASR model", CmdTrainAsr);
  add("train-lm", "train the external transformer LM", CmdTrainLm);
  add("train-ilm", "estimate the internal LM of a trained ASR decoder", CmdTrainIlm);

  auto [decode_cmd, decode_args] =
      add("decode", "beam-search decode a split with optional LM/ILM fusion", CmdDecode);
  MirrorOption(decode_cmd, decode_args, "--lambda_lm", "fusion.lambda_lm",
               "external LM weight");
  MirrorOption(decode_cmd, decode_args, "--lambda_ilm", "fusion.lambda_ilm",
               "internal LM subtraction weight");
  MirrorOption(decode_cmd, decode_args, "--ctc_weight", "fusion.ctc_weight",
               "CTC branch weight in joint decoding");
  MirrorOption(decode_cmd, decode_args, "--ilm_target", "fusion.ilm_target",
               "where the ILM subtraction lands: attention_only | joint");
  MirrorOption(decode_cmd, decode_args, "--beam_size", "fusion.beam_size", "beam width");
  MirrorOption(decode_cmd, decode_args, "--max_len_ratio", "fusion.max_len_ratio",
               "hypothesis length bound as a ratio of encoder frames");
  MirrorOption(decode_cmd, decode_args, "--length_penalty", "fusion.length_penalty",
               "per-token bonus in the final ranking");
  decode_cmd->add_flag_function(
      "--shallow",
      [decode_args](int64_t) { decode_args->overrides.push_back("shallow=true"); },
      "use the dedicated shallow-fusion path (no ILM scorer)");
  MirrorOption(decode_cmd, decode_args, "--jobs", "jobs",
               "max parallel utterance decodes");

  auto [sweep_cmd, sweep_args] = add(
      "sweep-ilm-weight", "grid-search lambda_ilm by MER on a validation split",
      CmdSweepIlmWeight);
  MirrorOption(sweep_cmd, sweep_args, "--jobs", "jobs", "max parallel utterance decodes");

  add("eval", "score a decode against references (MER) and/or compute LM perplexity",
      CmdEval);
  add("diag-loss", "export train/valid loss curves and flag validation divergence",
      CmdDiagLoss);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (const auto& [cmd, entry] : entries) {
    if (!cmd->parsed()) continue;
    try {
      return Dispatch(*entry.args, entry.run);
    } catch (const std::exception& e) {
      const nlohmann::json err = {{"error", e.what()}, {"command", cmd->get_name()}};
      std::fprintf(stderr, "%s\n", err.dump().c_str());
      return 1;
    }
  }
  std::fprintf(stderr, "{\"error\":\"no subcommand\"}\n");
  return 1;
}
