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

#ifndef ILMEFUSE_ILME_H_
#define ILMEFUSE_ILME_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ilmefuse/models.h"
#include "ilmefuse/train.h"

namespace ilmefuse {

// The only trainable state during internal-LM estimation. One set per
// model, shared by every decoder block.
struct IlmParams {
  CrossMode kind = CrossMode::kOtcl;  // kOtcl or kLscl
  int hidden = 0;                     // Lscl FFN width
  ParamStore params;                  // "ilm.bias" or "ilm.ffn.{w1,b1,w2,b2}"
};

// Fresh ILM parameters for a trained decoder: OTCL bias starts at zero,
// LSCL FFN at small seeded random weights. The model itself is untouched.
IlmParams AttachIlm(const AsrModel& model, CrossMode kind, int hidden, uint64_t seed);

struct IlmTrainReport {
  LossLog log;  // per-epoch transcript cross-entropy, nats per token
  double final_valid_perplexity = 0.0;
  uint64_t frozen_checksum_before = 0;
  uint64_t frozen_checksum_after = 0;
};

// Next-token cross-entropy of decoder_step in the ILM mode (encoder output
// absent), trained with the model's own parameters frozen. Any update
// routed to a non-ILM parameter is a hard error.
IlmTrainReport TrainIlm(const AsrModel& model, IlmParams* ilm,
                        const std::vector<std::vector<int>>& train_seqs,
                        const std::vector<std::vector<int>>& valid_seqs,
                        const TrainSchedule& schedule);

// log P_ILM(tokens): chained decoder_step log-probabilities in the ILM
// mode, eos step included. Always <= 0.
double IlmSequenceLogProb(const AsrModel& model, const IlmParams& ilm,
                          const std::vector<int>& tokens);

}  // namespace ilmefuse

#endif  // ILMEFUSE_ILME_H_
