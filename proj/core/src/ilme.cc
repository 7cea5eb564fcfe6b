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

#include "ilmefuse/ilme.h"

#include <algorithm>
#include <cmath>

#include "ilmefuse/rng.h"

namespace ilmefuse {

namespace {

void InitIlmLinear(ParamStore* store, const std::string& w, const std::string& b, int in,
                   int out, Rng* rng) {
  Param& pw = store->Create(w, in, out);
  const double s = std::sqrt(6.0 / static_cast<double>(in + out));
  for (int i = 0; i < pw.value.size(); ++i) pw.value[i] = (2.0 * rng->Uniform() - 1.0) * s;
  store->Create(b, 1, out);  // zeros
}

void AddGrads(std::map<std::string, Tensor>* into, const std::map<std::string, Tensor>& add) {
  for (const auto& [name, g] : add) {
    auto it = into->find(name);
    if (it == into->end()) {
      into->emplace(name, g);
    } else {
      for (int i = 0; i < g.size(); ++i) it->second[i] += g[i];
    }
  }
}

// sos + tokens in, tokens + eos out; negative sum of picked log-probs.
Var BuildIlmLoss(Tape* tape, const AsrModel& model, const IlmParams& ilm,
                 const std::vector<int>& tokens) {
  std::vector<int> input_ids;
  input_ids.reserve(tokens.size() + 1);
  input_ids.push_back(Vocab::kSosId);
  input_ids.insert(input_ids.end(), tokens.begin(), tokens.end());
  std::vector<int> targets(tokens);
  targets.push_back(Vocab::kEosId);
  Var logp = BuildDecoderLogProbs(tape, model, Var(), ilm.kind, &ilm.params, input_ids,
                                  nullptr);
  return tape->Scale(tape->Sum(tape->Pick(logp, targets)), -1.0);
}

}  // namespace

IlmParams AttachIlm(const AsrModel& model, CrossMode kind, int hidden, uint64_t seed) {
  model.cfg.Validate();
  Check(kind == CrossMode::kOtcl || kind == CrossMode::kLscl,
        "attach_ilm: kind must be Otcl or Lscl, got ", CrossModeName(kind));
  IlmParams ilm;
  ilm.kind = kind;
  if (kind == CrossMode::kOtcl) {
    ilm.hidden = 0;
    ilm.params.Create("ilm.bias", 1, model.cfg.d_model);  // zeros
  } else {
    Check(hidden > 0, "attach_ilm: Lscl hidden size must be positive, got ", hidden);
    ilm.hidden = hidden;
    Rng rng(Rng::DeriveSeed(seed, "ilm.init"));
    InitIlmLinear(&ilm.params, "ilm.ffn.w1", "ilm.ffn.b1", model.cfg.d_model, hidden, &rng);
    InitIlmLinear(&ilm.params, "ilm.ffn.w2", "ilm.ffn.b2", hidden, model.cfg.d_model, &rng);
  }
  return ilm;
}

IlmTrainReport TrainIlm(const AsrModel& model, IlmParams* ilm,
                        const std::vector<std::vector<int>>& train_seqs,
                        const std::vector<std::vector<int>>& valid_seqs,
                        const TrainSchedule& schedule) {
  Check(ilm != nullptr, "train_ilm: null ilm");
  model.cfg.Validate();
  schedule.Validate();

  IlmTrainReport report;
  report.frozen_checksum_before = model.params.Checksum();

  if (schedule.epochs > 0) {
    Check(!train_seqs.empty(), "train_ilm: training transcripts are empty");
    Check(!valid_seqs.empty(), "train_ilm: validation transcripts are empty");

    // Gradients are requested for the ILM names only; the optimizer updates
    // the ILM store only. The model is const on top of that, and the
    // before/after checksums in the report prove the freeze held.
    const std::vector<std::string> ilm_names = ilm->params.Names();
    AdamNoam opt(model.cfg.d_model, schedule.lr_factor, schedule.warmup_steps);
    Rng shuffle_rng(Rng::DeriveSeed(schedule.seed, "ilm.shuffle"));

    std::vector<int> order(train_seqs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 1; epoch <= schedule.epochs; ++epoch) {
      shuffle_rng.Shuffle(&order);
      double train_nll = 0.0;
      double train_tokens = 0.0;
      for (size_t start = 0; start < order.size();
           start += static_cast<size_t>(schedule.batch_size)) {
        const size_t end = std::min(order.size(), start + schedule.batch_size);
        std::map<std::string, Tensor> grads;
        for (size_t k = start; k < end; ++k) {
          const std::vector<int>& tokens = train_seqs[order[k]];
          Check(!tokens.empty(), "train_ilm: sequence ", order[k], " is empty");
          Tape tape;
          Var loss = BuildIlmLoss(&tape, model, *ilm, tokens);
          const double nll = loss.value().at(0, 0);
          Check(std::isfinite(nll), "train_ilm: diverged at step ", opt.steps() + 1,
                " on sequence ", order[k], " (loss = ", nll, ")");
          train_nll += nll;
          train_tokens += static_cast<double>(tokens.size()) + 1.0;  // eos counts
          AddGrads(&grads, tape.Gradients(loss, ilm_names));
        }
        for (auto& [name, g] : grads) {
          (void)name;
          for (int i = 0; i < g.size(); ++i) g[i] /= static_cast<double>(end - start);
        }
        opt.Step(&ilm->params, grads);
      }

      double valid_nll = 0.0;
      double valid_tokens = 0.0;
      for (const std::vector<int>& tokens : valid_seqs) {
        Check(!tokens.empty(), "train_ilm: empty validation sequence");
        Tape tape;
        valid_nll += BuildIlmLoss(&tape, model, *ilm, tokens).value().at(0, 0);
        valid_tokens += static_cast<double>(tokens.size()) + 1.0;
      }

      // Nats per token, eos included: exp(valid entry) is the perplexity.
      report.log.Append(epoch, "train", "lm", train_nll / train_tokens);
      report.log.Append(epoch, "valid", "lm", valid_nll / valid_tokens);
    }
  }

  if (!valid_seqs.empty()) {
    double nll = 0.0;
    double tokens = 0.0;
    for (const std::vector<int>& seq : valid_seqs) {
      nll -= IlmSequenceLogProb(model, *ilm, seq);
      tokens += static_cast<double>(seq.size()) + 1.0;
    }
    report.final_valid_perplexity = std::exp(nll / tokens);
  }

  report.frozen_checksum_after = model.params.Checksum();
  Check(report.frozen_checksum_before == report.frozen_checksum_after,
        "train_ilm: frozen decoder parameters changed during ILM estimation");
  return report;
}

double IlmSequenceLogProb(const AsrModel& model, const IlmParams& ilm,
                          const std::vector<int>& tokens) {
  Check(!tokens.empty(), "ilm_sequence_logprob: empty token sequence");
  return AttentionSequenceLogProb(model, nullptr, ilm.kind, &ilm.params, tokens);
}

}  // namespace ilmefuse
