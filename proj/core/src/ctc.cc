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

#include "ilmefuse/ctc.h"

#include <cmath>
#include <limits>

#include "ilmefuse/common.h"
#include "ilmefuse/kernels.h"

namespace ilmefuse {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
using kernels::LogAdd;
}  // namespace

double CtcNll(const Tensor& logp, const std::vector<int>& labels, int blank, Tensor* grad) {
  const int frames = logp.rows();
  const int n = static_cast<int>(labels.size());
  Check(frames >= 1, "CtcNll: need at least one frame");
  for (int l : labels) {
    Check(l >= 0 && l < logp.cols() && l != blank, "CtcNll: invalid label ", l);
  }

  // Extended label sequence with blanks interleaved: B l1 B l2 ... ln B.
  const int states = 2 * n + 1;
  auto label_of = [&](int s) { return (s % 2 == 0) ? blank : labels[s / 2]; };
  auto can_skip = [&](int s) {
    // A diagonal s-2 -> s transition is allowed unless s is a blank state
    // or repeats the label two states back.
    return s % 2 == 1 && s >= 2 && labels[s / 2] != labels[s / 2 - 1];
  };

  std::vector<std::vector<double>> alpha(frames, std::vector<double>(states, kNegInf));
  alpha[0][0] = logp.at(0, blank);
  if (states > 1) alpha[0][1] = logp.at(0, label_of(1));
  for (int t = 1; t < frames; ++t) {
    for (int s = 0; s < states; ++s) {
      double acc = alpha[t - 1][s];
      if (s >= 1) acc = LogAdd(acc, alpha[t - 1][s - 1]);
      if (can_skip(s)) acc = LogAdd(acc, alpha[t - 1][s - 2]);
      alpha[t][s] = acc + logp.at(t, label_of(s));
    }
  }

  double total = alpha[frames - 1][states - 1];
  if (states > 1) total = LogAdd(total, alpha[frames - 1][states - 2]);
  if (total == kNegInf) {
    return std::numeric_limits<double>::infinity();
  }
  if (grad == nullptr) return -total;

  // beta[t][s]: log mass of completions from state s after frame t,
  // excluding frame t's own emission.
  std::vector<std::vector<double>> beta(frames, std::vector<double>(states, kNegInf));
  beta[frames - 1][states - 1] = 0.0;
  if (states > 1) beta[frames - 1][states - 2] = 0.0;
  for (int t = frames - 2; t >= 0; --t) {
    for (int s = 0; s < states; ++s) {
      double acc = beta[t + 1][s] + logp.at(t + 1, label_of(s));
      if (s + 1 < states) {
        acc = LogAdd(acc, beta[t + 1][s + 1] + logp.at(t + 1, label_of(s + 1)));
      }
      if (s + 2 < states && can_skip(s + 2)) {
        acc = LogAdd(acc, beta[t + 1][s + 2] + logp.at(t + 1, label_of(s + 2)));
      }
      beta[t][s] = acc;
    }
  }

  *grad = Tensor(frames, logp.cols());
  for (int t = 0; t < frames; ++t) {
    for (int s = 0; s < states; ++s) {
      if (alpha[t][s] == kNegInf || beta[t][s] == kNegInf) continue;
      // Occupancy of (t, s) relative to the total path mass.
      grad->at(t, label_of(s)) -= std::exp(alpha[t][s] + beta[t][s] - total);
    }
  }
  return -total;
}

CtcPrefixScorer::CtcPrefixScorer(const Tensor& log_posteriors, int blank, int eos)
    : logp_(log_posteriors), blank_(blank), eos_(eos), frames_(log_posteriors.rows()) {
  Check(frames_ >= 1, "CtcPrefixScorer: need at least one frame");
  Check(blank_ >= 0 && blank_ < log_posteriors.cols(), "CtcPrefixScorer: blank out of range");
}

CtcPrefixScorer::State CtcPrefixScorer::InitialState() const {
  State s;
  s.r_nb.assign(frames_, kNegInf);
  s.r_b.resize(frames_);
  double acc = 0.0;
  for (int t = 0; t < frames_; ++t) {
    acc += logp_.at(t, blank_);
    s.r_b[t] = acc;
  }
  s.prefix_score = 0.0;
  s.last_token = -1;
  return s;
}

double CtcPrefixScorer::ExtendInternal(const State& state, int token, State* out) const {
  Check(token != blank_, "CtcPrefixScorer: blank is not a hypothesis symbol");
  if (token == eos_) {
    // Total probability of the collapse being exactly the current prefix.
    const double score = LogAdd(state.r_nb[frames_ - 1], state.r_b[frames_ - 1]);
    if (out != nullptr) {
      *out = state;
      out->prefix_score = score;
      out->last_token = token;
    }
    return score;
  }

  const bool empty_prefix = state.last_token < 0;
  const bool repeated = token == state.last_token;
  std::vector<double> r_nb(frames_), r_b(frames_);

  // A non-empty prefix occupies at least one earlier frame, so the new
  // symbol can start at frame 0 only when extending the empty prefix.
  r_nb[0] = empty_prefix ? logp_.at(0, token) : kNegInf;
  r_b[0] = kNegInf;
  double score = r_nb[0];

  for (int t = 1; t < frames_; ++t) {
    // Mass allowed to move into the new symbol at frame t: prefix ending in
    // blank always; ending in its last symbol only when the symbol changes.
    double phi = state.r_b[t - 1];
    if (!repeated) phi = LogAdd(phi, state.r_nb[t - 1]);
    r_nb[t] = LogAdd(r_nb[t - 1], phi) + logp_.at(t, token);
    r_b[t] = LogAdd(r_b[t - 1], r_nb[t - 1]) + logp_.at(t, blank_);
    score = LogAdd(score, phi + logp_.at(t, token));
  }

  if (out != nullptr) {
    out->r_nb = std::move(r_nb);
    out->r_b = std::move(r_b);
    out->prefix_score = score;
    out->last_token = token;
  }
  return score;
}

CtcPrefixScorer::State CtcPrefixScorer::Extend(const State& state, int token) const {
  State out;
  ExtendInternal(state, token, &out);
  return out;
}

std::vector<double> CtcPrefixScorer::ExtendScores(const State& state,
                                                  const std::vector<int>& tokens) const {
  std::vector<double> scores;
  scores.reserve(tokens.size());
  for (int token : tokens) scores.push_back(ExtendInternal(state, token, nullptr));
  return scores;
}

}  // namespace ilmefuse
