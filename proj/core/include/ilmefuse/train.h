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

#ifndef ILMEFUSE_TRAIN_H_
#define ILMEFUSE_TRAIN_H_

#include <map>
#include <string>
#include <vector>

#include "ilmefuse/models.h"

namespace ilmefuse {

struct TrainSchedule {
  int epochs = 40;
  int batch_size = 8;
  int warmup_steps = 200;
  double lr_factor = 1.0;
  double dropout = 0.1;
  double ctc_weight = 0.3;  // training-time joint weight (ASR only)
  int average_top_k = 10;   // checkpoint averaging pool, picked by valid loss
  uint64_t seed = 1;

  void Validate() const;
};

struct LossLogEntry {
  int epoch = 0;
  std::string split;      // train | valid
  std::string criterion;  // ctc | att | lm
  double loss = 0.0;
};

struct LossLog {
  std::vector<LossLogEntry> entries;

  void Append(int epoch, const std::string& split, const std::string& criterion, double loss);
  double Find(int epoch, const std::string& split, const std::string& criterion) const;
  void WriteCsv(const std::string& path) const;
  static LossLog ReadCsv(const std::string& path);
};

struct TrainUtterance {
  std::string utt_id;
  std::vector<int> tokens;
  Tensor features;
};

// Adam with the inverse-square-root warmup schedule. Refuses to touch
// parameters that are not flagged trainable — that refusal is what
// enforces the frozen-decoder guarantee during ILM estimation.
class AdamNoam {
 public:
  AdamNoam(int d_model, double factor, int warmup_steps);

  void Step(ParamStore* store, const std::map<std::string, Tensor>& grads);

  int steps() const { return step_; }
  double LearningRate(int step) const;

 private:
  int d_model_;
  double factor_;
  int warmup_;
  int step_ = 0;
  std::map<std::string, std::pair<Tensor, Tensor>> moments_;
};

struct TrainResult {
  LossLog log;
  // Element-wise mean of the best-validation snapshots (the decoding
  // checkpoint); the model itself keeps its final-epoch weights.
  ParamStore averaged;
};

// Joint CTC/attention training. Logs one train and one valid entry per
// criterion per epoch; aborts with the failing step and utterance on a
// non-finite loss.
TrainResult TrainAsr(AsrModel* model, const std::vector<TrainUtterance>& train,
                     const std::vector<TrainUtterance>& valid, const TrainSchedule& schedule);

TrainResult TrainLm(LmModel* model, const std::vector<std::vector<int>>& train,
                    const std::vector<std::vector<int>>& valid, const TrainSchedule& schedule);

}  // namespace ilmefuse

#endif  // ILMEFUSE_TRAIN_H_
