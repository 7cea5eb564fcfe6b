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

#ifndef ILMEFUSE_CTC_H_
#define ILMEFUSE_CTC_H_

#include <vector>

#include "ilmefuse/tensor.h"

namespace ilmefuse {

// Forward-algorithm negative log-likelihood of `labels` under per-frame
// log-scores `log_posteriors` [T x (V+1)], blank in column `blank`.
// If grad is non-null it receives d(nll)/d(log_posteriors), same shape.
// Returns +inf when no alignment exists (label sequence too long for T).
double CtcNll(const Tensor& log_posteriors, const std::vector<int>& labels, int blank,
              Tensor* grad = nullptr);

// Label-synchronous CTC prefix scoring over blank / non-blank forward
// variables. A scorer is bound to one utterance's log-posteriors; states
// are cheap value types owned by the decoding hypotheses.
class CtcPrefixScorer {
 public:
  struct State {
    // r_nb[t] / r_b[t]: log mass of alignments over frames [0, t] whose
    // collapse equals the prefix, ending in its last symbol / in blank.
    std::vector<double> r_nb;
    std::vector<double> r_b;
    double prefix_score = 0.0;  // log mass of alignments whose collapse begins with the prefix
    int last_token = -1;
  };

  CtcPrefixScorer(const Tensor& log_posteriors, int blank, int eos);

  State InitialState() const;

  // Extends `state` with `token` and returns the new state; `token` must
  // not be the blank. Extending with eos finishes the hypothesis: the
  // resulting prefix_score is the log-probability that the collapse equals
  // the prefix exactly.
  State Extend(const State& state, int token) const;

  // Score of Extend(state, token) for every token in `tokens`, without
  // materializing the states. Same arithmetic as Extend.
  std::vector<double> ExtendScores(const State& state, const std::vector<int>& tokens) const;

  int frames() const { return frames_; }

 private:
  double ExtendInternal(const State& state, int token, State* out) const;

  const Tensor& logp_;
  int blank_;
  int eos_;
  int frames_;
};

}  // namespace ilmefuse

#endif  // ILMEFUSE_CTC_H_
