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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "cli_util.h"
#include "commands.h"
#include "ilmefuse/common.h"

namespace ilmefuse {
namespace cli {

namespace {

struct Curve {
  std::vector<int> epochs;
  std::vector<double> train;
  std::vector<double> valid;
};

Curve ExtractCurve(const LossLog& log, const std::string& criterion) {
  std::set<int> train_epochs;
  std::set<int> valid_epochs;
  for (const LossLogEntry& e : log.entries) {
    if (e.criterion != criterion) continue;
    if (e.split == "train") train_epochs.insert(e.epoch);
    if (e.split == "valid") valid_epochs.insert(e.epoch);
  }
  Curve curve;
  for (int epoch : train_epochs) {
    if (valid_epochs.count(epoch) == 0) continue;
    curve.epochs.push_back(epoch);
    curve.train.push_back(log.Find(epoch, "train", criterion));
    curve.valid.push_back(log.Find(epoch, "valid", criterion));
  }
  return curve;
}

// Divergence: validation loss rises for >= 3 consecutive epoch steps while
// the training loss falls on those same steps. Returns the epoch at which
// the third such step completes, or -1.
int DivergenceEpoch(const Curve& c) {
  int streak = 0;
  for (size_t i = 0; i + 1 < c.epochs.size(); ++i) {
    const bool diverging = c.valid[i + 1] > c.valid[i] && c.train[i + 1] < c.train[i];
    streak = diverging ? streak + 1 : 0;
    if (streak >= 3) return c.epochs[i + 1];
  }
  return -1;
}

}  // namespace

void CmdDiagLoss(const nlohmann::json& config) {
  CheckKeys(config, "diag-loss", {"loss_csv", "out_dir"});
  const std::string loss_csv = RequireString(config, "loss_csv", "diag-loss");
  const std::string out_dir = RequireString(config, "out_dir", "diag-loss");

  const LossLog log = LossLog::ReadCsv(loss_csv);
  std::set<std::string> criteria;
  for (const LossLogEntry& e : log.entries) criteria.insert(e.criterion);
  Check(!criteria.empty(), "diag-loss: ", loss_csv, " holds no loss entries");

  std::filesystem::create_directories(out_dir);
  std::string csv = "epoch,criterion,train_loss,valid_loss\n";
  nlohmann::json flags = nlohmann::json::object();
  std::string summary = "diag-loss:";
  for (const std::string& criterion : criteria) {
    const Curve curve = ExtractCurve(log, criterion);
    for (size_t i = 0; i < curve.epochs.size(); ++i) {
      char row[128];
      std::snprintf(row, sizeof(row), "%d,%s,%.17g,%.17g\n", curve.epochs[i],
                    criterion.c_str(), curve.train[i], curve.valid[i]);
      csv += row;
    }
    const int epoch = DivergenceEpoch(curve);
    flags[criterion] = {{"diverges", epoch >= 0}, {"epoch", epoch}};
    summary += StrCat(" ", criterion, "=",
                      epoch >= 0 ? StrCat("diverges@", epoch) : std::string("ok"));
  }

  const std::string csv_path = out_dir + "/diag.csv";
  std::ofstream out(csv_path);
  Check(out.good(), "diag-loss: cannot write ", csv_path);
  out << csv;
  out.flush();
  Check(out.good(), "diag-loss: write failed for ", csv_path);
  SaveJsonFile(out_dir + "/diag.json", flags);

  const nlohmann::json resolved = {{"loss_csv", loss_csv}, {"out_dir", out_dir}};
  WriteResolvedConfig(out_dir, "diag-loss", resolved);

  std::printf("%s -> %s\n", summary.c_str(), csv_path.c_str());
}

}  // namespace cli
}  // namespace ilmefuse
