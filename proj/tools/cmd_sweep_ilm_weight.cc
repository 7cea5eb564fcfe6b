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
#include "ilmefuse/evalkit.h"

namespace ilmefuse {
namespace cli {

void CmdSweepIlmWeight(const nlohmann::json& config) {
  CheckKeys(config, "sweep-ilm-weight",
            {"data_dir", "out_dir", "split", "asr_checkpoint", "lm_checkpoint",
             "ilm_checkpoint", "grid", "jobs", "fusion"});
  const std::string data_dir = RequireString(config, "data_dir", "sweep-ilm-weight");
  const std::string out_dir = RequireString(config, "out_dir", "sweep-ilm-weight");
  const std::string split = GetString(config, "split", "tune");
  const std::string asr_path = RequireString(config, "asr_checkpoint", "sweep-ilm-weight");
  const std::string lm_path = GetString(config, "lm_checkpoint", "");
  const std::string ilm_path = RequireString(config, "ilm_checkpoint", "sweep-ilm-weight");
  const int jobs = GetInt(config, "jobs", 1);
  const FusionConfig base = FusionFromJson(config.value("fusion", nlohmann::json::object()));

  std::vector<double> grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  if (config.contains("grid")) {
    Check(config["grid"].is_array(), "sweep-ilm-weight: grid must be an array of numbers");
    grid.clear();
    for (const auto& v : config["grid"]) {
      Check(v.is_number(), "sweep-ilm-weight: grid must be an array of numbers");
      grid.push_back(v.get<double>());
    }
    Check(!grid.empty(), "sweep-ilm-weight: grid is empty");
  }

  const Dataset ds = Dataset::Open(data_dir);
  const AsrModel asr = LoadAsrModel(asr_path, ds.vocab);
  std::optional<LmModel> lm;
  if (!lm_path.empty()) lm.emplace(LoadLmModel(lm_path, ds.vocab));
  Check(base.lambda_lm == 0.0 || lm.has_value(),
        "sweep-ilm-weight: lambda_lm > 0 needs an lm_checkpoint");
  const IlmParams ilm = LoadIlmParams(ilm_path, asr);

  FusedModels models;
  models.asr = &asr;
  models.lm = lm ? &*lm : nullptr;
  models.ilm = &ilm;

  const std::vector<Utterance> utts = ds.LoadSplit(split);
  Check(!utts.empty(), "sweep-ilm-weight: split \"", split, "\" is empty");
  std::vector<MixedTokenSeq> refs;
  refs.reserve(utts.size());
  for (const Utterance& u : utts) refs.push_back(ToMixedSeq(u.tokens, ds.vocab));

  // Encoder outputs do not depend on the fusion weights; reuse them
  // across the grid.
  std::vector<EncoderOutput> encs(utts.size());
  ParallelFor(static_cast<int>(utts.size()), jobs,
              [&](int i) { encs[i] = Encode(asr, utts[i].features); });

  std::filesystem::create_directories(out_dir);
  std::string csv = "lambda_ilm,mer\n";
  double best_lambda = grid.front();
  double best_mer = 0.0;
  bool have_best = false;
  for (const double lambda_ilm : grid) {
    FusionConfig cfg = base;
    cfg.lambda_ilm = lambda_ilm;
    cfg.Validate();
    std::vector<MixedTokenSeq> hyps(utts.size());
    ParallelFor(static_cast<int>(utts.size()), jobs, [&](int i) {
      const std::vector<Hypothesis> nbest = BeamSearch(models, encs[i], cfg);
      Check(!nbest.empty(), "sweep-ilm-weight: no hypothesis for ", utts[i].utt_id);
      hyps[i] = ToMixedSeq(nbest.front().tokens, ds.vocab);
    });
    const MerReport mer = MerCorpus(refs, hyps);
    char row[80];
    std::snprintf(row, sizeof(row), "%.17g,%.17g\n", lambda_ilm, mer.mer);
    csv += row;
    if (!have_best || mer.mer < best_mer) {
      have_best = true;
      best_mer = mer.mer;
      best_lambda = lambda_ilm;
    }
    std::printf("sweep-ilm-weight: lambda_ilm %.3f -> mer %.4f\n", lambda_ilm, mer.mer);
  }

  const std::string csv_path = out_dir + "/sweep.csv";
  std::ofstream out(csv_path);
  Check(out.good(), "sweep-ilm-weight: cannot write ", csv_path);
  out << csv;
  out.flush();
  Check(out.good(), "sweep-ilm-weight: write failed for ", csv_path);
  SaveJsonFile(out_dir + "/sweep_best.json",
               {{"lambda_ilm", best_lambda}, {"mer", best_mer}});

  const nlohmann::json resolved = {{"data_dir", data_dir},
                                   {"out_dir", out_dir},
                                   {"split", split},
                                   {"asr_checkpoint", asr_path},
                                   {"lm_checkpoint", lm_path},
                                   {"ilm_checkpoint", ilm_path},
                                   {"grid", grid},
                                   {"jobs", jobs},
                                   {"fusion", FusionToJson(base)}};
  WriteResolvedConfig(out_dir, "sweep-ilm-weight", resolved);

  std::printf("sweep-ilm-weight: best lambda_ilm %.3f (mer %.4f) -> %s\n", best_lambda,
              best_mer, csv_path.c_str());
}

}  // namespace cli
}  // namespace ilmefuse
