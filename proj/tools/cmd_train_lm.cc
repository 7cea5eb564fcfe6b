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

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "cli_util.h"
#include "commands.h"
#include "ilmefuse/common.h"
#include "ilmefuse/rng.h"

namespace ilmefuse {
namespace cli {

void CmdTrainLm(const nlohmann::json& config) {
  CheckKeys(config, "train-lm",
            {"data_dir", "out_dir", "seed", "text", "valid_text", "model", "schedule"});
  const std::string data_dir = RequireString(config, "data_dir", "train-lm");
  const std::string out_dir = RequireString(config, "out_dir", "train-lm");
  const auto seed = static_cast<uint64_t>(GetInt(config, "seed", 1));
  const std::string text = GetString(config, "text", "lm1");
  const std::string valid_text = GetString(config, "valid_text", "lm_valid");
  const nlohmann::json model_json = config.value("model", nlohmann::json::object());
  const nlohmann::json sched_json = config.value("schedule", nlohmann::json::object());

  const Dataset ds = Dataset::Open(data_dir);
  const LmConfig cfg = LmConfigFromJson(model_json, ds.vocab.size());
  const TrainSchedule schedule = ScheduleFromJson(sched_json, seed);

  const std::vector<std::vector<int>> train = ds.LoadTextSet(text);
  const std::vector<std::vector<int>> valid = ds.LoadTextSet(valid_text);

  LmModel model = LmModel::NewRandom(cfg, ds.vocab, Rng::DeriveSeed(seed, "lm.init"));
  const TrainResult result = TrainLm(&model, train, valid, schedule);

  std::filesystem::create_directories(out_dir);
  const nlohmann::json extra = {{"schedule", ScheduleToJson(schedule)}, {"text", text}};
  SaveLmCheckpoint(out_dir + "/lm.ckpt", model, result.averaged, extra);
  result.log.WriteCsv(out_dir + "/loss.csv");

  nlohmann::json resolved = {{"data_dir", data_dir},
                             {"out_dir", out_dir},
                             {"seed", seed},
                             {"text", text},
                             {"valid_text", valid_text},
                             {"model", LmConfigToJson(cfg)},
                             {"schedule", ScheduleToJson(schedule)}};
  resolved["model"].erase("vocab_size");
  WriteResolvedConfig(out_dir, "train-lm", resolved);

  if (schedule.epochs > 0) {
    const double nats = result.log.Find(schedule.epochs, "valid", "lm");
    std::printf("train-lm: %d epochs on %zu sequences of \"%s\"; valid perplexity %.4f\n",
                schedule.epochs, train.size(), text.c_str(), std::exp(nats));
  } else {
    std::printf("train-lm: 0 epochs; saved the initial model\n");
  }
}

}  // namespace cli
}  // namespace ilmefuse
