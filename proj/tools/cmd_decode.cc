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
#include <fstream>
#include <optional>

#include "cli_util.h"
#include "commands.h"
#include "ilmefuse/common.h"

namespace ilmefuse {
namespace cli {

void CmdDecode(const nlohmann::json& config) {
  CheckKeys(config, "decode",
            {"data_dir", "out_dir", "split", "asr_checkpoint", "lm_checkpoint",
             "ilm_checkpoint", "shallow", "jobs", "nbest", "fusion"});
  const std::string data_dir = RequireString(config, "data_dir", "decode");
  const std::string out_dir = RequireString(config, "out_dir", "decode");
  const std::string split = GetString(config, "split", "test");
  const std::string asr_path = RequireString(config, "asr_checkpoint", "decode");
  const std::string lm_path = GetString(config, "lm_checkpoint", "");
  const std::string ilm_path = GetString(config, "ilm_checkpoint", "");
  const bool shallow = GetBool(config, "shallow", false);
  const int jobs = GetInt(config, "jobs", 1);
  const FusionConfig fusion = FusionFromJson(config.value("fusion", nlohmann::json::object()));

  Check(!(shallow && fusion.lambda_ilm != 0.0),
        "decode: the shallow path takes no lambda_ilm; set it to 0");
  Check(fusion.lambda_lm == 0.0 || !lm_path.empty(),
        "decode: lambda_lm > 0 needs an lm_checkpoint");
  Check(fusion.lambda_ilm == 0.0 || !ilm_path.empty(),
        "decode: lambda_ilm > 0 needs an ilm_checkpoint");

  std::filesystem::create_directories(out_dir);
  const std::string nbest_path =
      GetString(config, "nbest", "").empty() ? out_dir + "/nbest.jsonl"
                                             : GetString(config, "nbest", "");

  const Dataset ds = Dataset::Open(data_dir);
  const AsrModel asr = LoadAsrModel(asr_path, ds.vocab);
  std::optional<LmModel> lm;
  if (!lm_path.empty()) lm.emplace(LoadLmModel(lm_path, ds.vocab));
  std::optional<IlmParams> ilm;
  if (!ilm_path.empty()) ilm.emplace(LoadIlmParams(ilm_path, asr));

  FusedModels models;
  models.asr = &asr;
  models.lm = lm ? &*lm : nullptr;
  models.ilm = ilm ? &*ilm : nullptr;

  const std::vector<Utterance> utts = ds.LoadSplit(split);
  Check(!utts.empty(), "decode: split \"", split, "\" is empty");

  // Utterances decode independently; lines land in utt_id (= input) order
  // regardless of the job count.
  std::vector<std::string> lines(utts.size());
  ParallelFor(static_cast<int>(utts.size()), jobs, [&](int i) {
    const Utterance& utt = utts[i];
    const EncoderOutput enc = Encode(asr, utt.features);
    const std::vector<Hypothesis> nbest = shallow
                                              ? ShallowFusionBeamSearch(models, enc, fusion)
                                              : BeamSearch(models, enc, fusion);
    lines[i] = NbestToJson(utt.utt_id, nbest, ds.vocab).dump();
  });

  std::ofstream out(nbest_path);
  Check(out.good(), "decode: cannot write ", nbest_path);
  for (const std::string& line : lines) out << line << '\n';
  out.flush();
  Check(out.good(), "decode: write failed for ", nbest_path);

  const nlohmann::json resolved = {{"data_dir", data_dir},
                                   {"out_dir", out_dir},
                                   {"split", split},
                                   {"asr_checkpoint", asr_path},
                                   {"lm_checkpoint", lm_path},
                                   {"ilm_checkpoint", ilm_path},
                                   {"shallow", shallow},
                                   {"jobs", jobs},
                                   {"nbest", nbest_path},
                                   {"fusion", FusionToJson(fusion)}};
  WriteResolvedConfig(out_dir, "decode", resolved);

  std::printf("decode: %zu utterances of \"%s\" -> %s (%s, beam %d)\n", utts.size(),
              split.c_str(), nbest_path.c_str(),
              shallow ? "shallow fusion" : "ILME fusion", fusion.beam_size);
}

}  // namespace cli
}  // namespace ilmefuse
