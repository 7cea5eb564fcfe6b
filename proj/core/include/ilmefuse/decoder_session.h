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

#ifndef ILMEFUSE_DECODER_SESSION_H_
#define ILMEFUSE_DECODER_SESSION_H_

#include <vector>

#include "ilmefuse/models.h"

namespace ilmefuse {

// Incremental decoder scoring with per-block key/value caches. Every row
// operation routes through the same kernels as the full-prefix tape
// forward, and attention accumulates in the same order, so the emitted
// distributions are bit-identical to DecoderLogProbsFull's last row.
// Sessions are value types: copying one forks the hypothesis state.
class DecoderSession {
 public:
  // Consumes sos immediately; next_log_probs() is valid from construction.
  DecoderSession(const AsrModel& model, const EncoderOutput* enc, CrossMode mode,
                 const ParamStore* ilm);

  void Advance(int token);

  // Log-distribution over the vocab for the token following everything
  // consumed so far.
  const Tensor& next_log_probs() const { return next_log_probs_; }
  // Tokens consumed including sos.
  int steps() const { return pos_; }
  // Cross-attention sublayer output (post-residual) per block for the most
  // recent position; test probe.
  const std::vector<Tensor>& last_cross_out() const { return last_cross_out_; }

 private:
  void Step(int token);

  const AsrModel* model_;
  CrossMode mode_;
  const ParamStore* ilm_;
  // Per-block keys/values projected from h_enc once (Full mode only).
  std::vector<Tensor> cross_k_, cross_v_;
  struct BlockCache {
    Tensor self_k, self_v;  // grows one row per consumed position
  };
  std::vector<BlockCache> cache_;
  std::vector<Tensor> last_cross_out_;
  Tensor next_log_probs_;
  int pos_ = 0;
};

// Same machinery for the external LM (self-attention + FFN blocks only).
class LmSession {
 public:
  explicit LmSession(const LmModel& model);

  void Advance(int token);
  const Tensor& next_log_probs() const { return next_log_probs_; }
  int steps() const { return pos_; }

 private:
  void Step(int token);

  const LmModel* model_;
  struct BlockCache {
    Tensor self_k, self_v;
  };
  std::vector<BlockCache> cache_;
  Tensor next_log_probs_;
  int pos_ = 0;
};

}  // namespace ilmefuse

#endif  // ILMEFUSE_DECODER_SESSION_H_
