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

#include "cli_util.h"
#include "commands.h"
#include "ilmefuse/common.h"

namespace ilmefuse {
namespace cli {

void CmdGenData(const nlohmann::json& config) {
  CheckKeys(config, "gen-data", {"preset", "out_dir", "seed", "scale", "noise_sigma"});
  DatasetPreset preset;
  preset.name = RequireString(config, "preset", "gen-data");
  preset.seed = static_cast<uint64_t>(GetInt(config, "seed", 1));
  preset.scale = GetDouble(config, "scale", 1.0);
  preset.noise_sigma = GetDouble(config, "noise_sigma", 0.5);
  const std::string out_dir = RequireString(config, "out_dir", "gen-data");

  const nlohmann::json manifest = WriteDataset(preset, out_dir);

  nlohmann::json resolved = {{"preset", preset.name},
                             {"out_dir", out_dir},
                             {"seed", preset.seed},
                             {"scale", preset.scale},
                             {"noise_sigma", preset.noise_sigma}};
  WriteResolvedConfig(out_dir, "gen-data", resolved);

  int splits = 0;
  for (const auto& item : manifest.at("splits").items()) {
    splits += item.value().at("utterances").get<int>();
  }
  std::printf("gen-data: wrote %s preset to %s (%d utterances, %zu lm sets)\n",
              preset.name.c_str(), out_dir.c_str(), splits, manifest.at("lm_sets").size());
}

}  // namespace cli
}  // namespace ilmefuse
