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

#include "ilmefuse/evalkit.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "ilmefuse/common.h"

namespace ilmefuse {

namespace {

MerClassStats* StatsFor(MerReport* report, TokenClass cls) {
  return cls == TokenClass::kWordLike ? &report->word_like : &report->char_like;
}

}  // namespace

MixedTokenSeq TokenizeMixed(const std::string& text, const Vocab& vocab) {
  MixedTokenSeq units;
  std::istringstream stream(text);
  std::string piece;
  while (stream >> piece) {
    if (vocab.Contains(piece) && vocab.Class(vocab.Id(piece)) == TokenClass::kWordLike) {
      units.push_back({piece, TokenClass::kWordLike});
      continue;
    }
    // A run of char_like symbols written without spaces.
    for (char c : piece) {
      const std::string sym(1, c);
      Check(vocab.Contains(sym), "tokenize: unknown symbol \"", sym, "\" in \"", piece, "\"");
      const TokenClass cls = vocab.Class(vocab.Id(sym));
      Check(cls == TokenClass::kCharLike, "tokenize: symbol \"", sym,
            "\" is not char_like inside run \"", piece, "\"");
      units.push_back({sym, TokenClass::kCharLike});
    }
  }
  return units;
}

MixedTokenSeq ToMixedSeq(const std::vector<int>& tokens, const Vocab& vocab) {
  MixedTokenSeq units;
  units.reserve(tokens.size());
  for (int id : tokens) {
    Check(vocab.IsContent(id), "mixed units: token id ", id, " is not a content token");
    units.push_back({vocab.Symbol(id), vocab.Class(id)});
  }
  return units;
}

MerReport Mer(const MixedTokenSeq& ref, const MixedTokenSeq& hyp) {
  Check(!ref.empty(), "mer: empty reference");
  const int n = static_cast<int>(ref.size());
  const int m = static_cast<int>(hyp.size());

  // d[i][j]: edit distance between ref[0, i) and hyp[0, j).
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (int i = 0; i <= n; ++i) d[i][0] = i;
  for (int j = 0; j <= m; ++j) d[0][j] = j;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= m; ++j) {
      const int sub = d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int ins = d[i][j - 1] + 1;
      const int del = d[i - 1][j] + 1;
      d[i][j] = std::min(sub, std::min(ins, del));
    }
  }

  MerReport report;
  report.ref_len = n;
  for (const MixedUnit& u : ref) ++StatsFor(&report, u.cls)->ref_len;

  // Trace back preferring substitution/match over insertion over deletion.
  int i = n;
  int j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (!(ref[i - 1] == hyp[j - 1])) {
        ++report.substitutions;
        ++StatsFor(&report, ref[i - 1].cls)->substitutions;
      }
      --i;
      --j;
    } else if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      ++report.insertions;
      ++StatsFor(&report, hyp[j - 1].cls)->insertions;
      --j;
    } else {
      ++report.deletions;
      ++StatsFor(&report, ref[i - 1].cls)->deletions;
      --i;
    }
  }

  report.mer = static_cast<double>(report.substitutions + report.insertions +
                                   report.deletions) /
               static_cast<double>(report.ref_len);
  return report;
}

MerReport MerCorpus(const std::vector<MixedTokenSeq>& refs,
                    const std::vector<MixedTokenSeq>& hyps, MerPooling pooling) {
  Check(refs.size() == hyps.size(), "mer: ", refs.size(), " references vs ", hyps.size(),
        " hypotheses");
  Check(!refs.empty(), "mer: empty corpus");
  MerReport total;
  double mer_sum = 0.0;
  for (size_t u = 0; u < refs.size(); ++u) {
    const MerReport r = Mer(refs[u], hyps[u]);
    total.substitutions += r.substitutions;
    total.insertions += r.insertions;
    total.deletions += r.deletions;
    total.ref_len += r.ref_len;
    for (TokenClass cls : {TokenClass::kCharLike, TokenClass::kWordLike}) {
      MerClassStats* into = StatsFor(&total, cls);
      const MerClassStats* from = cls == TokenClass::kWordLike ? &r.word_like : &r.char_like;
      into->substitutions += from->substitutions;
      into->insertions += from->insertions;
      into->deletions += from->deletions;
      into->ref_len += from->ref_len;
    }
    mer_sum += r.mer;
  }
  if (pooling == MerPooling::kPooled) {
    total.mer = static_cast<double>(total.substitutions + total.insertions + total.deletions) /
                static_cast<double>(total.ref_len);
  } else {
    total.mer = mer_sum / static_cast<double>(refs.size());
  }
  return total;
}

PerplexityReport Perplexity(const std::function<double(const std::vector<int>&)>& scorer,
                            const std::vector<std::vector<int>>& corpus, bool skip_infinite) {
  Check(!corpus.empty(), "perplexity: empty corpus");
  PerplexityReport report;
  for (size_t u = 0; u < corpus.size(); ++u) {
    const double logprob = scorer(corpus[u]);
    Check(!std::isnan(logprob), "perplexity: NaN log-probability on sequence ", u);
    if (std::isinf(logprob)) {
      Check(skip_infinite, "perplexity: sequence ", u,
            " has -inf log-probability (pass skip_infinite to drop such sequences)");
      ++report.skipped_sequences;
      continue;
    }
    report.total_logprob += logprob;
    report.predicted_tokens += static_cast<long>(corpus[u].size()) + 1;  // + eos
  }
  Check(report.predicted_tokens > 0, "perplexity: every sequence was skipped");
  report.perplexity =
      std::exp(-report.total_logprob / static_cast<double>(report.predicted_tokens));
  return report;
}

CorpusStats ComputeCorpusStats(const std::vector<MixedTokenSeq>& corpus) {
  CorpusStats stats;
  stats.utterances = static_cast<long>(corpus.size());
  for (const MixedTokenSeq& units : corpus) {
    for (size_t i = 0; i < units.size(); ++i) {
      if (units[i].cls == TokenClass::kWordLike) {
        ++stats.word_like_units;
      } else {
        ++stats.char_like_units;
      }
      if (i > 0 && units[i].cls != units[i - 1].cls) ++stats.switch_points;
    }
  }
  const long total = stats.char_like_units + stats.word_like_units;
  if (total > 0) {
    stats.char_like_ratio = static_cast<double>(stats.char_like_units) / total;
    stats.word_like_ratio = static_cast<double>(stats.word_like_units) / total;
  }
  return stats;
}

}  // namespace ilmefuse
