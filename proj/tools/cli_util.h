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

#ifndef ILMEFUSE_TOOLS_CLI_UTIL_H_
#define ILMEFUSE_TOOLS_CLI_UTIL_H_

#include <functional>
#include <string>
#include <vector>

#include "ilmefuse/checkpoint.h"
#include "ilmefuse/config.h"
#include "ilmefuse/corpus.h"
#include "ilmefuse/decoding.h"
#include "ilmefuse/ilme.h"
#include "ilmefuse/models.h"
#include "ilmefuse/train.h"
#include "json.hpp"

namespace ilmefuse {
namespace cli {

// Loads the optional config file and applies --set key=value overrides in
// order. An empty path starts from an empty object.
nlohmann::json ResolveConfig(const std::string& config_path,
                             const std::vector<std::string>& overrides);

// Every run writes its fully resolved config next to its outputs so the
// run can be re-validated and reproduced from the artifact alone.
void WriteResolvedConfig(const std::string& out_dir, const std::string& command,
                         const nlohmann::json& resolved);

// A generated dataset directory: manifest + vocab + split access.
struct Dataset {
  std::string dir;
  nlohmann::json manifest;
  Vocab vocab;

  static Dataset Open(const std::string& dir);

  int d_feat() const;
  const nlohmann::json& Split(const std::string& name) const;

  // Transcripts with synthesized features attached.
  std::vector<Utterance> LoadSplit(const std::string& name) const;
  // Transcripts only (LM-side uses).
  std::vector<Utterance> LoadTranscripts(const std::string& name) const;
  // One of the manifest's LM text sets.
  std::vector<std::vector<int>> LoadTextSet(const std::string& name) const;
};

std::vector<TrainUtterance> ToTrainUtterances(const std::vector<Utterance>& utts);
std::vector<std::vector<int>> TokensOnly(const std::vector<Utterance>& utts);

// Model/schedule configs <-> JSON. FromJson applies defaults and rejects
// unknown keys.
FusionConfig FusionFromJson(const nlohmann::json& j);
nlohmann::json FusionToJson(const FusionConfig& c);
AsrConfig AsrConfigFromJson(const nlohmann::json& j, int d_feat, int vocab_size);
nlohmann::json AsrConfigToJson(const AsrConfig& c);
LmConfig LmConfigFromJson(const nlohmann::json& j, int vocab_size);
nlohmann::json LmConfigToJson(const LmConfig& c);
TrainSchedule ScheduleFromJson(const nlohmann::json& j, uint64_t seed);
nlohmann::json ScheduleToJson(const TrainSchedule& s);

// Checkpoint round trips. Loaders rebuild the model from the stored arch,
// verify the parameter set matches it, and check the vocab hash.
void SaveAsrCheckpoint(const std::string& path, const AsrModel& model,
                       const ParamStore& params, const nlohmann::json& extra);
AsrModel LoadAsrModel(const std::string& path, const Vocab& vocab);

void SaveLmCheckpoint(const std::string& path, const LmModel& model,
                      const ParamStore& params, const nlohmann::json& extra);
LmModel LoadLmModel(const std::string& path, const Vocab& vocab);

// The ILM checkpoint stores only the estimator's parameters plus the
// checksum of the ASR parameters it was estimated against; loading against
// a different ASR model is an error.
void SaveIlmCheckpoint(const std::string& path, const IlmParams& ilm, const AsrModel& asr,
                       const nlohmann::json& extra);
IlmParams LoadIlmParams(const std::string& path, const AsrModel& asr);

// Runs fn(0..n-1) on up to `jobs` threads. fn must only touch state owned
// by its own index; the first exception is rethrown after all threads join.
void ParallelFor(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace cli
}  // namespace ilmefuse

#endif  // ILMEFUSE_TOOLS_CLI_UTIL_H_
