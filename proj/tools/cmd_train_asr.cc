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

void CmdTrainAsr(const nlohmann::json& config) {
  CheckKeys(config, "train-asr",
            {"data_dir", "out_dir", "seed", "train_split", "valid_split", "model",
             "schedule"});
  const std::string data_dir = RequireString(config, "data_dir", "train-asr");
  const std::string out_dir = RequireString(config, "out_dir", "train-asr");
  const auto seed = static_cast<uint64_t>(GetInt(config, "seed", 1));
  const std::string train_split = GetString(config, "train_split", "asr_train");
  const std::string valid_split = GetString(config, "valid_split", "asr_valid");
  const nlohmann::json model_json = config.value("model", nlohmann::json::object());
  const nlohmann::json sched_json = config.value("schedule", nlohmann::json::object());

  const Dataset ds = Dataset::Open(data_dir);
  const AsrConfig cfg = AsrConfigFromJson(model_json, ds.d_feat(), ds.vocab.size());
  const TrainSchedule schedule = ScheduleFromJson(sched_json, seed);

  const std::vector<TrainUtterance> train = ToTrainUtterances(ds.LoadSplit(train_split));
  const std::vector<TrainUtterance> valid = ToTrainUtterances(ds.LoadSplit(valid_split));

  AsrModel model = AsrModel::NewRandom(cfg, ds.vocab, Rng::DeriveSeed(seed, "asr.init"));
  const TrainResult result = TrainAsr(&model, train, valid, schedule);

  std::filesystem::create_directories(out_dir);
  const nlohmann::json extra = {{"schedule", ScheduleToJson(schedule)},
                                {"train_split", train_split},
                                {"params", "averaged"}};
  SaveAsrCheckpoint(out_dir + "/asr.ckpt", model, result.averaged, extra);
  nlohmann::json final_extra = extra;
  final_extra["params"] = "final_epoch";
  SaveAsrCheckpoint(out_dir + "/asr_final.ckpt", model, model.params, final_extra);
  result.log.WriteCsv(out_dir + "/loss.csv");

  nlohmann::json resolved = {{"data_dir", data_dir},
                             {"out_dir", out_dir},
                             {"seed", seed},
                             {"train_split", train_split},
                             {"valid_split", valid_split},
                             {"model", AsrConfigToJson(cfg)},
                             {"schedule", ScheduleToJson(schedule)}};
  resolved["model"].erase("vocab_size");  // derived from the dataset
  resolved["model"].erase("d_feat");
  WriteResolvedConfig(out_dir, "train-asr", resolved);

  if (schedule.epochs > 0) {
    const double ctc = result.log.Find(schedule.epochs, "valid", "ctc");
    const double att = result.log.Find(schedule.epochs, "valid", "att");
    std::printf("train-asr: %d epochs on %zu utterances; final valid ctc %.4f att %.4f\n",
                schedule.epochs, train.size(), ctc, att);
  } else {
    std::printf("train-asr: 0 epochs; saved the initial model\n");
  }
}

}  // namespace cli
}  // namespace ilmefuse
