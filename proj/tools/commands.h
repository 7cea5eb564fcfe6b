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

#ifndef ILMEFUSE_TOOLS_COMMANDS_H_
#define ILMEFUSE_TOOLS_COMMANDS_H_

#include "json.hpp"

namespace ilmefuse {
namespace cli {

// Each command consumes a resolved config (file + overrides already
// merged), writes its artifacts plus resolved_config.json into the
// config's out_dir, and throws ilmefuse::Error on any failure.
void CmdGenData(const nlohmann::json& config);
void CmdTrainAsr(const nlohmann::json& config);
void CmdTrainLm(const nlohmann::json& config);
void CmdTrainIlm(const nlohmann::json& config);
void CmdDecode(const nlohmann::json& config);
void CmdEval(const nlohmann::json& config);
void CmdSweepIlmWeight(const nlohmann::json& config);
void CmdDiagLoss(const nlohmann::json& config);

}  // namespace cli
}  // namespace ilmefuse

#endif  // ILMEFUSE_TOOLS_COMMANDS_H_
