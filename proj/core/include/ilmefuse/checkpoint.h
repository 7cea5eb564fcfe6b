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

#ifndef ILMEFUSE_CHECKPOINT_H_
#define ILMEFUSE_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ilmefuse/autodiff.h"
#include "json.hpp"

namespace ilmefuse {

struct CheckpointMeta {
  std::string kind;  // asr | lm | asr+ilm
  uint64_t vocab_hash = 0;
  nlohmann::json arch = nlohmann::json::object();
  nlohmann::json extra = nlohmann::json::object();
};

// Container of named parameter arrays: magic + version, a JSON metadata
// record, then per-param shape headers and 32-bit little-endian values.
void SaveCheckpoint(const std::string& path, const CheckpointMeta& meta,
                    const ParamStore& params);

struct Checkpoint {
  CheckpointMeta meta;
  ParamStore params;
};

Checkpoint LoadCheckpoint(const std::string& path);

// Element-wise arithmetic mean. Addends are sorted before summation so the
// result is exactly invariant to the order of the snapshot list.
ParamStore AverageParamStores(const std::vector<const ParamStore*>& stores);

}  // namespace ilmefuse

#endif  // ILMEFUSE_CHECKPOINT_H_
