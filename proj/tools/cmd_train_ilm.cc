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
#include <filesystem>

#include "cli_util.h"
#include "commands.h"
#include "ilmefuse/common.h"
#include "ilmefuse/rng.h"

namespace ilmefuse {
namespace cli {

void CmdTrainIlm(const nlohmann::json& config) {
  CheckKeys(config, "train-ilm",
            {"data_dir", "out_dir", "seed", "asr_checkpoint", "method", "hidden", "text",
             "valid_text", "schedule"});
  const std::string data_dir = RequireString(config, "data_dir", "train-ilm");
  const std::string out_dir = RequireString(config, "out_dir", "train-ilm");
  const std::string asr_path = RequireString(config, "asr_checkpoint", "train-ilm");
  const auto seed = static_cast<uint64_t>(GetInt(config, "seed", 1));
  const std::string method_name = GetString(config, "method", "lscl");
  const int hidden = GetInt(config, "hidden", 32);
  // Empty text keys mean "the ASR model's own training transcripts" — the
  // internal LM is an estimate of what the decoder absorbed from them.
  const std::string text = GetString(config, "text", "");
  const std::string valid_text = GetString(config, "valid_text", "");
  const nlohmann::json sched_json = config.value("schedule", nlohmann::json::object());

  const CrossMode method = CrossModeFromName(method_name);
  Check(method != CrossMode::kFull, "train-ilm: method must be otcl or lscl");

  const Dataset ds = Dataset::Open(data_dir);
  const TrainSchedule schedule = ScheduleFromJson(sched_json, seed);
  const AsrModel model = LoadAsrModel(asr_path, ds.vocab);

  const std::vector<std::vector<int>> train =
      text.empty() ? TokensOnly(ds.LoadTranscripts("asr_train")) : ds.LoadTextSet(text);
  const std::vector<std::vector<int>> valid =
      valid_text.empty() ? TokensOnly(ds.LoadTranscripts("asr_valid"))
                         : ds.LoadTextSet(valid_text);

  IlmParams ilm = AttachIlm(model, method, hidden, Rng::DeriveSeed(seed, "ilm.attach"));
  const IlmTrainReport report = TrainIlm(model, &ilm, train, valid, schedule);

  std::filesystem::create_directories(out_dir);
  const nlohmann::json report_json = {
      {"method", CrossModeName(method)},
      {"hidden", ilm.hidden},
      {"final_valid_perplexity", report.final_valid_perplexity},
      {"frozen_checksum_before", report.frozen_checksum_before},
      {"frozen_checksum_after", report.frozen_checksum_after},
      {"frozen_parameters_unchanged",
       report.frozen_checksum_before == report.frozen_checksum_after}};
  SaveIlmCheckpoint(out_dir + "/ilm.ckpt", ilm, model,
                    {{"final_valid_perplexity", report.final_valid_perplexity}});
  report.log.WriteCsv(out_dir + "/loss.csv");
  SaveJsonFile(out_dir + "/ilm_report.json", report_json);

  const nlohmann::json resolved = {{"data_dir", data_dir},
                                   {"out_dir", out_dir},
                                   {"seed", seed},
                                   {"asr_checkpoint", asr_path},
                                   {"method", CrossModeName(method)},
                                   {"hidden", hidden},
                                   {"text", text},
                                   {"valid_text", valid_text},
                                   {"schedule", ScheduleToJson(schedule)}};
  WriteResolvedConfig(out_dir, "train-ilm", resolved);

  std::printf(
      "train-ilm: %s on %zu sequences; valid perplexity %.4f; frozen parameters %s\n",
      CrossModeName(method), train.size(), report.final_valid_perplexity,
      report.frozen_checksum_before == report.frozen_checksum_after ? "unchanged"
                                                                    : "CHANGED");
}

}  // namespace cli
}  // namespace ilmefuse
