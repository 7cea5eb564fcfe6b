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

#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "ilmefuse/common.h"
#include "ilmefuse/config.h"

namespace ilmefuse {
namespace {

namespace fs = std::filesystem;

TEST_CASE("apply_dotted_override: values, nesting and parsing") {
  nlohmann::json config = {{"train", {{"epochs", 10}, {"lr_factor", 1.0}}}};

  ApplyDottedOverride(&config, "train.epochs=25");
  CHECK(config["train"]["epochs"] == 25);

  ApplyDottedOverride(&config, "train.lr_factor=0.5");
  CHECK(config["train"]["lr_factor"] == 0.5);

  // Non-JSON text stays a string; JSON literals keep their type.
  ApplyDottedOverride(&config, "decode.ilm_target=attention_only");
  CHECK(config["decode"]["ilm_target"] == "attention_only");
  ApplyDottedOverride(&config, "decode.use_lm=true");
  CHECK(config["decode"]["use_lm"] == true);
  ApplyDottedOverride(&config, "decode.weights=[0.1,0.2]");
  CHECK(config["decode"]["weights"] == nlohmann::json::array({0.1, 0.2}));

  // Intermediate objects are created on demand; scalars are replaced.
  ApplyDottedOverride(&config, "a.b.c=3");
  CHECK(config["a"]["b"]["c"] == 3);
  ApplyDottedOverride(&config, "train.epochs.nested=1");
  CHECK(config["train"]["epochs"]["nested"] == 1);

  CHECK_THROWS_WITH_AS(ApplyDottedOverride(&config, "no_equals"),
                       doctest::Contains("key=value"), Error);
  CHECK_THROWS_WITH_AS(ApplyDottedOverride(&config, "=5"), doctest::Contains("key=value"),
                       Error);
  CHECK_THROWS_WITH_AS(ApplyDottedOverride(&config, "a..b=1"),
                       doctest::Contains("empty key segment"), Error);
}

TEST_CASE("check_keys: rejects unknown keys by name") {
  const nlohmann::json config = {{"epochs", 3}, {"seed", 7}};
  CheckKeys(config, "train", {"epochs", "seed", "dropout"});
  CHECK_THROWS_WITH_AS(CheckKeys(config, "train", {"epochs"}),
                       doctest::Contains("unknown key \"seed\""), Error);
  CHECK_THROWS_WITH_AS(CheckKeys(nlohmann::json::array(), "train", {}),
                       doctest::Contains("JSON object"), Error);
}

TEST_CASE("typed getters: fallbacks and type checks") {
  const nlohmann::json config = {
      {"flag", true}, {"count", 3}, {"rate", 0.25}, {"name", "beam"}};

  CHECK(GetBool(config, "flag", false) == true);
  CHECK(GetBool(config, "missing", true) == true);
  CHECK(GetInt(config, "count", -1) == 3);
  CHECK(GetInt(config, "missing", -1) == -1);
  CHECK(GetDouble(config, "rate", 0.0) == 0.25);
  CHECK(GetDouble(config, "count", 0.0) == 3.0);  // ints promote
  CHECK(GetString(config, "name", "") == "beam");
  CHECK(GetString(config, "missing", "fallback") == "fallback");

  CHECK_THROWS_WITH_AS(GetBool(config, "count", false), doctest::Contains("want a bool"),
                       Error);
  CHECK_THROWS_WITH_AS(GetInt(config, "rate", 0), doctest::Contains("want an integer"),
                       Error);
  CHECK_THROWS_WITH_AS(GetString(config, "count", ""), doctest::Contains("want a string"),
                       Error);

  CHECK(RequireString(config, "name", "cli") == "beam");
  CHECK_THROWS_WITH_AS(RequireString(config, "missing", "cli"),
                       doctest::Contains("missing required key"), Error);
}

TEST_CASE("json files: round trip and error reporting") {
  const fs::path dir = fs::temp_directory_path() / "ilmefuse_test_config";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const nlohmann::json value = {{"a", 1}, {"b", {{"c", "text"}}}};
  const std::string path = (dir / "config.json").string();
  SaveJsonFile(path, value);
  CHECK(LoadJsonFile(path) == value);

  CHECK_THROWS_WITH_AS(LoadJsonFile((dir / "absent.json").string()),
                       doctest::Contains("cannot read"), Error);
  std::ofstream(dir / "broken.json") << "{not json";
  CHECK_THROWS_WITH_AS(LoadJsonFile((dir / "broken.json").string()),
                       doctest::Contains("bad JSON"), Error);

  fs::remove_all(dir);
}

}  // namespace
}  // namespace ilmefuse
