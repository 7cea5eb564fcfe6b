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

#include "ilmefuse/decoding.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

namespace ilmefuse {

namespace {

// Final ordering key; all finished hypotheses are ranked by it.
double SortKey(const Hypothesis& h, const FusionConfig& cfg) {
  return h.combined + cfg.length_penalty * static_cast<double>(h.tokens.size());
}

void SortHypotheses(std::vector<Hypothesis>* hyps, const FusionConfig& cfg) {
  std::sort(hyps->begin(), hyps->end(), [&cfg](const Hypothesis& a, const Hypothesis& b) {
    const double ka = SortKey(a, cfg);
    const double kb = SortKey(b, cfg);
    if (ka != kb) return ka > kb;
    return a.tokens < b.tokens;
  });
}

}  // namespace

const char* IlmTargetName(IlmTarget t) {
  switch (t) {
    case IlmTarget::kAttentionOnly: return "attention_only";
    case IlmTarget::kJoint: return "joint";
  }
  return "?";
}

IlmTarget IlmTargetFromName(const std::string& name) {
  if (name == "attention_only") return IlmTarget::kAttentionOnly;
  if (name == "joint") return IlmTarget::kJoint;
  Fail("unknown ilm_target \"", name, "\" (want attention_only or joint)");
}

void FusionConfig::Validate() const {
  Check(std::isfinite(lambda_lm) && lambda_lm >= 0.0,
        "fusion: lambda_lm must be finite and >= 0, got ", lambda_lm);
  Check(std::isfinite(lambda_ilm) && lambda_ilm >= 0.0,
        "fusion: lambda_ilm must be finite and >= 0, got ", lambda_ilm);
  Check(std::isfinite(ctc_weight) && ctc_weight >= 0.0 && ctc_weight <= 1.0,
        "fusion: ctc_weight must be in [0, 1], got ", ctc_weight);
  Check(beam_size >= 1, "fusion: beam_size must be >= 1, got ", beam_size);
  Check(std::isfinite(max_len_ratio) && max_len_ratio > 0.0,
        "fusion: max_len_ratio must be positive, got ", max_len_ratio);
  Check(std::isfinite(length_penalty), "fusion: length_penalty must be finite");
}

double CombineScores(const ScoreLedger& ledger, const FusionConfig& cfg) {
  double att_branch = ledger.att;
  if (cfg.ilm_target == IlmTarget::kAttentionOnly && cfg.lambda_ilm != 0.0) {
    att_branch -= cfg.lambda_ilm * ledger.ilm;
  }
  double combined = (1.0 - cfg.ctc_weight) * att_branch;
  if (cfg.ctc_weight != 0.0) combined += cfg.ctc_weight * ledger.ctc;
  if (cfg.lambda_lm != 0.0) combined += cfg.lambda_lm * ledger.lm;
  if (cfg.ilm_target == IlmTarget::kJoint && cfg.lambda_ilm != 0.0) {
    combined -= cfg.lambda_ilm * ledger.ilm;
  }
  return combined;
}

FusedScorer::FusedScorer(const FusedModels& models, const EncoderOutput& enc,
                         const FusionConfig& cfg)
    : models_(models), enc_(&enc), cfg_(cfg) {
  cfg.Validate();
  Check(models.asr != nullptr, "decode: missing ASR model");
  Check(enc.h_enc.rows() >= 1 && enc.h_enc.cols() == models.asr->cfg.d_model,
        "decode: malformed encoder output");
  Check(cfg.lambda_lm == 0.0 || models.lm != nullptr,
        "decode: lambda_lm > 0 but no external LM supplied");
  Check(cfg.lambda_ilm == 0.0 || models.ilm != nullptr,
        "decode: lambda_ilm > 0 but no ILM estimate supplied");
  if (models.lm != nullptr) {
    Check(models.lm->vocab.Hash() == models.asr->vocab.Hash(),
          "decode: external LM vocab differs from the ASR vocab");
  }
  candidates_ = models.asr->vocab.ContentIds();
  Check(!candidates_.empty(), "decode: vocab has no content tokens");
  use_ctc_ = cfg.ctc_weight != 0.0;
  if (use_ctc_) {
    ctc_logp_ = CtcLogPosteriors(*models.asr, enc);
    ctc_.emplace(ctc_logp_, models.asr->vocab.blank_id(), Vocab::kEosId);
  }
}

Hypothesis FusedScorer::Initial() const {
  Hypothesis h;
  h.dec.emplace(*models_.asr, enc_, CrossMode::kFull, nullptr);
  if (cfg_.lambda_lm != 0.0) h.lm.emplace(*models_.lm);
  if (cfg_.lambda_ilm != 0.0) {
    h.ilm.emplace(*models_.asr, nullptr, models_.ilm->kind, &models_.ilm->params);
  }
  if (use_ctc_) h.ctc_state = ctc_->InitialState();
  h.combined = CombineScores(h.ledger, cfg_);
  return h;
}

std::vector<Hypothesis> FusedScorer::Expand(const Hypothesis& hyp) const {
  Check(!hyp.finished, "decode: cannot expand a finished hypothesis");
  Check(hyp.dec.has_value(), "decode: hypothesis carries no decoder state");
  std::vector<Hypothesis> out;
  out.reserve(candidates_.size());
  for (int token : candidates_) {
    Hypothesis next = hyp;
    next.tokens.push_back(token);
    next.ledger.att += hyp.dec->next_log_probs().at(0, token);
    next.dec->Advance(token);
    if (next.lm.has_value()) {
      next.ledger.lm += hyp.lm->next_log_probs().at(0, token);
      next.lm->Advance(token);
    }
    if (next.ilm.has_value()) {
      next.ledger.ilm += hyp.ilm->next_log_probs().at(0, token);
      next.ilm->Advance(token);
    }
    if (use_ctc_) {
      next.ctc_state = ctc_->Extend(hyp.ctc_state, token);
      next.ledger.ctc = next.ctc_state.prefix_score;
    }
    next.combined = CombineScores(next.ledger, cfg_);
    out.push_back(std::move(next));
  }
  return out;
}

Hypothesis FusedScorer::Finish(const Hypothesis& hyp) const {
  Check(!hyp.finished, "decode: hypothesis already finished");
  Check(!hyp.tokens.empty(), "decode: the empty sequence is not a hypothesis");
  Check(hyp.dec.has_value(), "decode: hypothesis carries no decoder state");
  Hypothesis done = hyp;
  done.ledger.att += hyp.dec->next_log_probs().at(0, Vocab::kEosId);
  if (hyp.lm.has_value()) done.ledger.lm += hyp.lm->next_log_probs().at(0, Vocab::kEosId);
  if (hyp.ilm.has_value()) done.ledger.ilm += hyp.ilm->next_log_probs().at(0, Vocab::kEosId);
  if (use_ctc_) {
    done.ctc_state = ctc_->Extend(hyp.ctc_state, Vocab::kEosId);
    done.ledger.ctc = done.ctc_state.prefix_score;
  }
  done.combined = CombineScores(done.ledger, cfg_);
  done.finished = true;
  // Finished hypotheses are never extended again.
  done.dec.reset();
  done.lm.reset();
  done.ilm.reset();
  return done;
}

std::vector<Hypothesis> BeamSearch(const FusedModels& models, const EncoderOutput& enc,
                                   const FusionConfig& cfg) {
  FusedScorer scorer(models, enc, cfg);
  int max_len = static_cast<int>(cfg.max_len_ratio * scorer.t_enc());
  if (max_len < 1) max_len = 1;

  std::vector<Hypothesis> beam;
  beam.push_back(scorer.Initial());
  std::vector<Hypothesis> finished;

  for (int step = 1; step <= max_len; ++step) {
    std::vector<Hypothesis> pool;
    pool.reserve(beam.size() * scorer.candidates().size());
    for (const Hypothesis& hyp : beam) {
      // The eos branch of this hypothesis joins the finished pool; content
      // branches compete for the beam.
      if (!hyp.tokens.empty()) finished.push_back(scorer.Finish(hyp));
      for (Hypothesis& ext : scorer.Expand(hyp)) pool.push_back(std::move(ext));
    }
    SortHypotheses(&pool, cfg);
    if (static_cast<int>(pool.size()) > cfg.beam_size) pool.resize(cfg.beam_size);
    beam = std::move(pool);
  }
  // Hypotheses at the length bound are forced to emit eos.
  for (const Hypothesis& hyp : beam) finished.push_back(scorer.Finish(hyp));

  SortHypotheses(&finished, cfg);
  if (static_cast<int>(finished.size()) > cfg.beam_size) finished.resize(cfg.beam_size);
  return finished;
}

std::vector<Hypothesis> ShallowFusionBeamSearch(const FusedModels& models,
                                                const EncoderOutput& enc,
                                                const FusionConfig& cfg) {
  FusedModels no_ilm = models;
  no_ilm.ilm = nullptr;
  FusionConfig shallow = cfg;
  shallow.lambda_ilm = 0.0;
  return BeamSearch(no_ilm, enc, shallow);
}

Hypothesis ExhaustiveSearch(const FusedModels& models, const EncoderOutput& enc,
                            const FusionConfig& cfg, int max_len) {
  cfg.Validate();
  Check(models.asr != nullptr, "exhaustive: missing ASR model");
  Check(max_len >= 1, "exhaustive: max_len must be >= 1, got ", max_len);
  Check(cfg.lambda_lm == 0.0 || models.lm != nullptr,
        "exhaustive: lambda_lm > 0 but no external LM supplied");
  Check(cfg.lambda_ilm == 0.0 || models.ilm != nullptr,
        "exhaustive: lambda_ilm > 0 but no ILM estimate supplied");

  const std::vector<int> candidates = models.asr->vocab.ContentIds();
  Check(!candidates.empty(), "exhaustive: vocab has no content tokens");
  double total = 0.0;
  double power = 1.0;
  for (int l = 1; l <= max_len; ++l) {
    power *= static_cast<double>(candidates.size());
    total += power;
    Check(total <= 1e6, "exhaustive: enumeration budget exceeded (", candidates.size(),
          " tokens to length ", max_len, " is over 1e6 sequences)");
  }

  const int blank = models.asr->vocab.blank_id();
  Tensor ctc_logp;
  if (cfg.ctc_weight != 0.0) ctc_logp = CtcLogPosteriors(*models.asr, enc);

  Hypothesis best;
  double best_key = 0.0;
  bool have_best = false;
  std::vector<int> seq;

  // Complete sequences are scored with the full-sequence (non-incremental)
  // paths, so this doubles as an oracle for the cached scorers.
  const std::function<void()> visit = [&]() {
    if (!seq.empty()) {
      ScoreLedger ledger;
      ledger.att = AttentionSequenceLogProb(*models.asr, &enc, CrossMode::kFull, nullptr, seq);
      if (cfg.ctc_weight != 0.0) ledger.ctc = -CtcNll(ctc_logp, seq, blank);
      if (cfg.lambda_lm != 0.0) ledger.lm = LmSequenceLogProb(*models.lm, seq);
      if (cfg.lambda_ilm != 0.0) ledger.ilm = IlmSequenceLogProb(*models.asr, *models.ilm, seq);
      Hypothesis h;
      h.tokens = seq;
      h.ledger = ledger;
      h.combined = CombineScores(ledger, cfg);
      h.finished = true;
      const double key = SortKey(h, cfg);
      if (!have_best || key > best_key || (key == best_key && h.tokens < best.tokens)) {
        best = std::move(h);
        best_key = key;
        have_best = true;
      }
    }
    if (static_cast<int>(seq.size()) == max_len) return;
    for (int c : candidates) {
      seq.push_back(c);
      visit();
      seq.pop_back();
    }
  };
  visit();
  return best;
}

nlohmann::json NbestToJson(const std::string& utt_id, const std::vector<Hypothesis>& nbest,
                           const Vocab& vocab) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Hypothesis& h : nbest) {
    arr.push_back({{"tokens", h.tokens},
                   {"text", vocab.Render(h.tokens)},
                   {"att", h.ledger.att},
                   {"ctc", h.ledger.ctc},
                   {"lm", h.ledger.lm},
                   {"ilm", h.ledger.ilm},
                   {"combined", h.combined}});
  }
  return nlohmann::json{{"utt_id", utt_id}, {"nbest", arr}};
}

}  // namespace ilmefuse
