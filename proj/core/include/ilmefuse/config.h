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

#ifndef ILMEFUSE_CONFIG_H_
#define ILMEFUSE_CONFIG_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace ilmefuse {

// Reads a JSON object from a file. Errors carry the path.
nlohmann::json LoadJsonFile(const std::string& path);

// Writes pretty-printed JSON with a trailing newline.
void SaveJsonFile(const std::string& path, const nlohmann::json& value);

// Applies a "dotted.path=value" assignment to a JSON object, creating
// intermediate objects as needed. The value text is parsed as JSON when
// valid (numbers, bools, null, arrays) and kept verbatim as a string
// otherwise, so --set beam_size=4 and --set preset=smoke both work.
void ApplyDottedOverride(nlohmann::json* config, const std::string& assignment);

// Rejects top-level keys outside `allowed`, naming the offender and the
// config being validated. Catches typos before they silently no-op.
void CheckKeys(const nlohmann::json& config, const std::string& where,
               const std::vector<std::string>& allowed);

// Typed lookups with defaults; wrong types fail with the key name.
bool GetBool(const nlohmann::json& config, const std::string& key, bool fallback);
int GetInt(const nlohmann::json& config, const std::string& key, int fallback);
double GetDouble(const nlohmann::json& config, const std::string& key, double fallback);
std::string GetString(const nlohmann::json& config, const std::string& key,
                      const std::string& fallback);

// Lookup that must be present and a string (paths, preset names).
std::string RequireString(const nlohmann::json& config, const std::string& key,
                          const std::string& where);

}  // namespace ilmefuse

#endif  // ILMEFUSE_CONFIG_H_
