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

#ifndef ILMEFUSE_DECODING_H_
#define ILMEFUSE_DECODING_H_

#include <optional>
#include <string>
#include <vector>

#include "ilmefuse/ctc.h"
#include "ilmefuse/decoder_session.h"
#include "ilmefuse/ilme.h"
#include "ilmefuse/models.h"
#include "json.hpp"

namespace ilmefuse {

// Where the internal-LM subtraction lands. AttentionOnly folds it into the
// attention branch — combined = (1-γ)(att - λ_ILM·ilm) + γ·ctc + λ·lm —
// because the ILM is estimated from the decoder alone. Joint applies the
// subtraction to the whole acoustic score: (1-γ)att + γ·ctc + λ·lm - λ_ILM·ilm.
enum class IlmTarget { kAttentionOnly, kJoint };

const char* IlmTargetName(IlmTarget t);
IlmTarget IlmTargetFromName(const std::string& name);

struct FusionConfig {
  double lambda_lm = 0.0;   // λ: external LM weight
  double lambda_ilm = 0.0;  // λ_ILM: internal LM subtraction weight
  double ctc_weight = 0.4;  // γ: joint decoding weight on the CTC branch
  IlmTarget ilm_target = IlmTarget::kAttentionOnly;
  int beam_size = 8;
  double max_len_ratio = 1.0;  // hypothesis length bound: ratio × T_enc
  double length_penalty = 0.0;  // added per token to the final ordering key only

  void Validate() const;
};

// Cumulative per-source log-probabilities of one hypothesis. Each entry is
// the full sequence-so-far score of its source, so the combined score is
// recomputable from the ledger alone.
struct ScoreLedger {
  double att = 0.0;
  double ctc = 0.0;
  double lm = 0.0;
  double ilm = 0.0;
};

// The single fusion formula. Both the ILME and the shallow-fusion paths go
// through this function, and zero-weight terms are skipped rather than
// multiplied out, so λ_ILM = 0 degenerates to shallow fusion bit-exactly.
double CombineScores(const ScoreLedger& ledger, const FusionConfig& cfg);

struct FusedModels {
  const AsrModel* asr = nullptr;
  const LmModel* lm = nullptr;     // required when lambda_lm > 0
  const IlmParams* ilm = nullptr;  // required when lambda_ilm > 0
};

struct Hypothesis {
  std::vector<int> tokens;  // content tokens only (no sos/eos)
  ScoreLedger ledger;
  double combined = 0.0;
  bool finished = false;

  // Per-scorer incremental state; present only for the scorers the fusion
  // configuration activates.
  std::optional<DecoderSession> dec;
  std::optional<LmSession> lm;
  std::optional<DecoderSession> ilm;
  CtcPrefixScorer::State ctc_state;
};

// Fused per-step scoring bound to one utterance. Owns the CTC posteriors;
// not copyable so hypothesis states can never outlive them.
class FusedScorer {
 public:
  FusedScorer(const FusedModels& models, const EncoderOutput& enc, const FusionConfig& cfg);
  FusedScorer(const FusedScorer&) = delete;
  FusedScorer& operator=(const FusedScorer&) = delete;

  // Empty hypothesis: sos consumed everywhere, ledger all zero.
  Hypothesis Initial() const;

  // One extended hypothesis per content token, each with updated ledger,
  // combined score and scorer states.
  std::vector<Hypothesis> Expand(const Hypothesis& hyp) const;

  // The eos step: ledger updated with every scorer's end-of-sequence term,
  // tokens unchanged, finished set.
  Hypothesis Finish(const Hypothesis& hyp) const;

  const std::vector<int>& candidates() const { return candidates_; }
  int t_enc() const { return enc_->h_enc.rows(); }

 private:
  FusedModels models_;
  const EncoderOutput* enc_;
  FusionConfig cfg_;
  std::vector<int> candidates_;  // content token ids, ascending
  bool use_ctc_ = false;
  Tensor ctc_logp_;  // T_enc x (|V|+1), kept alive for the scorer below
  std::optional<CtcPrefixScorer> ctc_;
};

// Joint CTC/attention beam search with LM fusion. Hypotheses never exceed
// max_len_ratio × T_enc tokens (at least one token is always allowed), the
// empty sequence is not a hypothesis, and ties break lexicographically on
// token ids. Returns up to beam_size finished hypotheses, best first.
std::vector<Hypothesis> BeamSearch(const FusedModels& models, const EncoderOutput& enc,
                                   const FusionConfig& cfg);

// Dedicated shallow-fusion entry point (Hyp = argmax att/ctc + λ·lm). Same
// engine with the ILM scorer never instantiated; BeamSearch with
// lambda_ilm = 0 returns bit-identical results.
std::vector<Hypothesis> ShallowFusionBeamSearch(const FusedModels& models,
                                                const EncoderOutput& enc,
                                                const FusionConfig& cfg);

// Test oracle: scores every token sequence of length 1..max_len with
// full-sequence (non-incremental) scorers — teacher-forced attention,
// CTC alignment NLL, full LM/ILM forwards — and returns the argmax under
// the same combination formula. Enumeration is capped at 10^6 sequences.
Hypothesis ExhaustiveSearch(const FusedModels& models, const EncoderOutput& enc,
                            const FusionConfig& cfg, int max_len);

// One decode record: {"utt_id", "nbest": [{tokens, text, att, ctc, lm,
// ilm, combined}]}.
nlohmann::json NbestToJson(const std::string& utt_id, const std::vector<Hypothesis>& nbest,
                           const Vocab& vocab);

}  // namespace ilmefuse

#endif  // ILMEFUSE_DECODING_H_
