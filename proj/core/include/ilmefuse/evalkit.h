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

#ifndef ILMEFUSE_EVALKIT_H_
#define ILMEFUSE_EVALKIT_H_

#include <functional>
#include <string>
#include <vector>

#include "ilmefuse/vocab.h"

namespace ilmefuse {

// One scoring unit of mixed-error-rate evaluation: a single char_like
// symbol or one whitespace-delimited word_like symbol.
struct MixedUnit {
  std::string surface;
  TokenClass cls = TokenClass::kCharLike;

  bool operator==(const MixedUnit& o) const { return surface == o.surface && cls == o.cls; }
};

using MixedTokenSeq = std::vector<MixedUnit>;

// Splits rendered text into scoring units: word_like symbols stay whole,
// anything else is split per char_like symbol. Unknown symbols are errors.
MixedTokenSeq TokenizeMixed(const std::string& text, const Vocab& vocab);

// Token ids to scoring units, one unit per content token.
MixedTokenSeq ToMixedSeq(const std::vector<int>& tokens, const Vocab& vocab);

struct MerClassStats {
  long substitutions = 0;
  long insertions = 0;
  long deletions = 0;
  long ref_len = 0;
};

struct MerReport {
  long substitutions = 0;
  long insertions = 0;
  long deletions = 0;
  long ref_len = 0;
  double mer = 0.0;  // (S + I + D) / ref_len
  // Substitutions and deletions are attributed to the reference unit's
  // class, insertions to the hypothesis unit's class.
  MerClassStats char_like;
  MerClassStats word_like;
};

// Levenshtein alignment with unit costs; alignment ties prefer
// substitution over insertion over deletion.
MerReport Mer(const MixedTokenSeq& ref, const MixedTokenSeq& hyp);

enum class MerPooling {
  kPooled,               // corpus-wide counts / corpus-wide ref length (default)
  kPerUtteranceAverage,  // mean of per-utterance MERs
};

MerReport MerCorpus(const std::vector<MixedTokenSeq>& refs,
                    const std::vector<MixedTokenSeq>& hyps,
                    MerPooling pooling = MerPooling::kPooled);

struct PerplexityReport {
  double perplexity = 0.0;
  double total_logprob = 0.0;
  long predicted_tokens = 0;  // eos counted once per sequence
  long skipped_sequences = 0;
};

// exp(-total logprob / predicted tokens). A sequence scoring -inf is an
// error unless skip_infinite permits dropping it.
PerplexityReport Perplexity(const std::function<double(const std::vector<int>&)>& scorer,
                            const std::vector<std::vector<int>>& corpus,
                            bool skip_infinite = false);

struct CorpusStats {
  long utterances = 0;
  long char_like_units = 0;
  long word_like_units = 0;
  long switch_points = 0;  // adjacent units of different classes
  double char_like_ratio = 0.0;
  double word_like_ratio = 0.0;
};

CorpusStats ComputeCorpusStats(const std::vector<MixedTokenSeq>& corpus);

}  // namespace ilmefuse

#endif  // ILMEFUSE_EVALKIT_H_
