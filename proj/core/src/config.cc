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

#include "ilmefuse/config.h"

#include <algorithm>
#include <fstream>

#include "ilmefuse/common.h"

namespace ilmefuse {

nlohmann::json LoadJsonFile(const std::string& path) {
  std::ifstream in(path);
  Check(in.good(), "config: cannot read ", path);
  nlohmann::json value;
  try {
    in >> value;
  } catch (const std::exception& e) {
    Fail("config ", path, ": bad JSON: ", e.what());
  }
  return value;
}

void SaveJsonFile(const std::string& path, const nlohmann::json& value) {
  std::ofstream out(path);
  Check(out.good(), "config: cannot write ", path);
  out << value.dump(2) << '\n';
  out.flush();
  Check(out.good(), "config: write failed for ", path);
}

void ApplyDottedOverride(nlohmann::json* config, const std::string& assignment) {
  Check(config != nullptr, "override: null config");
  const size_t eq = assignment.find('=');
  Check(eq != std::string::npos && eq > 0, "override \"", assignment,
        "\": want key=value");
  const std::string dotted = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  nlohmann::json value = nlohmann::json::parse(text, /*cb=*/nullptr,
                                               /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;  // not JSON; keep as a string

  nlohmann::json* node = config;
  size_t start = 0;
  for (;;) {
    const size_t dot = dotted.find('.', start);
    const std::string key = dotted.substr(start, dot - start);
    Check(!key.empty(), "override \"", assignment, "\": empty key segment");
    if (dot == std::string::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = nlohmann::json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

void CheckKeys(const nlohmann::json& config, const std::string& where,
               const std::vector<std::string>& allowed) {
  Check(config.is_object(), where, ": config must be a JSON object");
  for (const auto& item : config.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      Fail(where, ": unknown key \"", item.key(), "\"");
    }
  }
}

namespace {

const nlohmann::json* FindKey(const nlohmann::json& config, const std::string& key) {
  if (!config.is_object()) return nullptr;
  const auto it = config.find(key);
  return it == config.end() ? nullptr : &*it;
}

}  // namespace

bool GetBool(const nlohmann::json& config, const std::string& key, bool fallback) {
  const nlohmann::json* v = FindKey(config, key);
  if (v == nullptr) return fallback;
  Check(v->is_boolean(), "config key \"", key, "\": want a bool");
  return v->get<bool>();
}

int GetInt(const nlohmann::json& config, const std::string& key, int fallback) {
  const nlohmann::json* v = FindKey(config, key);
  if (v == nullptr) return fallback;
  Check(v->is_number_integer(), "config key \"", key, "\": want an integer");
  return v->get<int>();
}

double GetDouble(const nlohmann::json& config, const std::string& key, double fallback) {
  const nlohmann::json* v = FindKey(config, key);
  if (v == nullptr) return fallback;
  Check(v->is_number(), "config key \"", key, "\": want a number");
  return v->get<double>();
}

std::string GetString(const nlohmann::json& config, const std::string& key,
                      const std::string& fallback) {
  const nlohmann::json* v = FindKey(config, key);
  if (v == nullptr) return fallback;
  Check(v->is_string(), "config key \"", key, "\": want a string");
  return v->get<std::string>();
}

std::string RequireString(const nlohmann::json& config, const std::string& key,
                          const std::string& where) {
  const nlohmann::json* v = FindKey(config, key);
  Check(v != nullptr, where, ": missing required key \"", key, "\"");
  Check(v->is_string(), where, ": key \"", key, "\": want a string");
  return v->get<std::string>();
}

}  // namespace ilmefuse
