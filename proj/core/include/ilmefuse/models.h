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

#ifndef ILMEFUSE_MODELS_H_
#define ILMEFUSE_MODELS_H_

#include <string>
#include <vector>

#include "ilmefuse/autodiff.h"
#include "ilmefuse/rng.h"
#include "ilmefuse/tensor.h"
#include "ilmefuse/vocab.h"

namespace ilmefuse {

// How a decoder block fills its cross-attention slot. Full attends over
// h_enc; Otcl substitutes a learned bias, Lscl a small shared FFN of the
// normalized decoder state. Otcl/Lscl never touch h_enc, which is what
// makes them internal-LM estimates.
enum class CrossMode { kFull, kOtcl, kLscl };

const char* CrossModeName(CrossMode m);
CrossMode CrossModeFromName(const std::string& name);

struct AsrConfig {
  int d_feat = 16;
  int d_model = 32;
  int heads = 2;
  int ffn = 64;
  int enc_blocks = 2;
  int dec_blocks = 2;
  int subsample = 2;
  double dropout = 0.1;
  int vocab_size = 0;  // filled from the vocab

  void Validate() const;
};

struct LmConfig {
  int d_model = 32;
  int heads = 2;
  int ffn = 64;
  int blocks = 2;
  double dropout = 0.1;
  int vocab_size = 0;

  void Validate() const;
};

struct AsrModel {
  AsrConfig cfg;
  Vocab vocab;
  ParamStore params;

  static AsrModel NewRandom(const AsrConfig& cfg, const Vocab& vocab, uint64_t seed);
};

struct LmModel {
  LmConfig cfg;
  Vocab vocab;
  ParamStore params;

  static LmModel NewRandom(const LmConfig& cfg, const Vocab& vocab, uint64_t seed);
};

struct EncoderOutput {
  Tensor h_enc;  // T_enc x d_model
  int t_in = 0;
};

// Present only while training: seeds the dropout masks baked onto the tape.
struct TrainCtx {
  Rng* rng = nullptr;
  double dropout = 0.0;
};

// Per-block activation probes for tests (cross-attention sublayer output
// after its residual, and the block's final output).
struct DecoderProbe {
  std::vector<Var> cross_out;
  std::vector<Var> block_out;
};

// Sinusoidal position encoding rows [start, start + count).
Tensor PositionEncoding(int start, int count, int d_model);

// Tape builders. All of them record the eval-mode computation when ctx is
// null and add dropout nodes otherwise.
Var BuildEncoder(Tape* tape, const AsrModel& model, const Tensor& features, TrainCtx* ctx);
Var BuildCtcLogProbs(Tape* tape, const AsrModel& model, Var h_enc);
// input_ids start with sos; the result is one log-distribution row (over
// the vocab, blank excluded) per input position. In kOtcl/kLscl mode pass
// an invalid h_enc and the matching ilm store.
Var BuildDecoderLogProbs(Tape* tape, const AsrModel& model, Var h_enc, CrossMode mode,
                         const ParamStore* ilm, const std::vector<int>& input_ids,
                         TrainCtx* ctx, DecoderProbe* probe = nullptr);
Var BuildLmLogProbs(Tape* tape, const LmModel& model, const std::vector<int>& input_ids,
                    TrainCtx* ctx);

struct AsrLossVars {
  Var joint;  // ctc_weight * ctc + (1 - ctc_weight) * att
  Var ctc;    // per-utterance CTC negative log-likelihood
  Var att;    // per-utterance attention cross-entropy (sum over steps)
};

// tokens is the content-token transcript (no sos/eos); teacher forcing
// frames it as sos + tokens -> tokens + eos.
AsrLossVars BuildAsrLoss(Tape* tape, const AsrModel& model, const Tensor& features,
                         const std::vector<int>& tokens, double ctc_weight, TrainCtx* ctx);
Var BuildLmLoss(Tape* tape, const LmModel& model, const std::vector<int>& tokens, TrainCtx* ctx);

// Eval-mode conveniences (deterministic, no dropout).
EncoderOutput Encode(const AsrModel& model, const Tensor& features);
Tensor CtcLogPosteriors(const AsrModel& model, const EncoderOutput& enc);
// Full-prefix forward: one row per input position.
Tensor DecoderLogProbsFull(const AsrModel& model, const EncoderOutput* enc, CrossMode mode,
                           const ParamStore* ilm, const std::vector<int>& input_ids);
// Next-token log-distribution after consuming sos + prefix.
Tensor DecoderStep(const AsrModel& model, const std::vector<int>& prefix,
                   const EncoderOutput* enc, CrossMode mode, const ParamStore* ilm);
Tensor LmLogProbsFull(const LmModel& model, const std::vector<int>& input_ids);

// Teacher-forced sequence log-probability (includes the eos step).
double AttentionSequenceLogProb(const AsrModel& model, const EncoderOutput* enc, CrossMode mode,
                                const ParamStore* ilm, const std::vector<int>& tokens);
double LmSequenceLogProb(const LmModel& model, const std::vector<int>& tokens);

}  // namespace ilmefuse

#endif  // ILMEFUSE_MODELS_H_
