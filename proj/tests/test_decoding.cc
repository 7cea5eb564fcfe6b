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

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ilmefuse/decoding.h"
#include "ilmefuse/ilme.h"
#include "ilmefuse/models.h"
#include "ilmefuse/rng.h"
#include "oracles.h"

namespace ilmefuse {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// One tiny end-to-end stack shared by the search tests: three content
// tokens, random (untrained) weights — every equivalence below is about
// the search mechanics, not model quality.
struct Stack {
  Vocab vocab = Vocab::Build({"A", "B", "C"}, {});
  AsrModel asr{{}, {}, {}};
  LmModel lm{{}, {}, {}};
  IlmParams ilm;

  Stack() {
    AsrConfig cfg;
    cfg.d_feat = 6;
    cfg.d_model = 16;
    cfg.heads = 2;
    cfg.ffn = 32;
    cfg.enc_blocks = 1;
    cfg.dec_blocks = 1;
    cfg.subsample = 2;
    cfg.dropout = 0.0;
    cfg.vocab_size = vocab.size();
    asr = AsrModel::NewRandom(cfg, vocab, 201);

    LmConfig lm_cfg;
    lm_cfg.d_model = 16;
    lm_cfg.heads = 2;
    lm_cfg.ffn = 32;
    lm_cfg.blocks = 1;
    lm_cfg.dropout = 0.0;
    lm_cfg.vocab_size = vocab.size();
    lm = LmModel::NewRandom(lm_cfg, vocab, 202);

    ilm = AttachIlm(asr, CrossMode::kLscl, 8, 203);
  }

  FusedModels Models() const { return {&asr, &lm, &ilm}; }

  EncoderOutput Encode(int frames, uint64_t seed) const {
    Rng rng(seed);
    Tensor features(frames, asr.cfg.d_feat);
    for (int i = 0; i < features.size(); ++i) features[i] = rng.Uniform() * 2.0 - 1.0;
    return ilmefuse::Encode(asr, features);
  }
};

const Stack& GetStack() {
  static const Stack* stack = new Stack;
  return *stack;
}

TEST_CASE("combine_scores: hand-worked fusion at both subtraction targets") {
  ScoreLedger ledger;
  ledger.att = -1.3;
  ledger.ctc = -2.1;
  ledger.lm = -0.7;
  ledger.ilm = -0.9;

  FusionConfig cfg;
  cfg.lambda_lm = 0.3;
  cfg.lambda_ilm = 0.2;
  cfg.ctc_weight = 0.4;

  cfg.ilm_target = IlmTarget::kJoint;
  // 0.6*(-1.3) + 0.4*(-2.1) + 0.3*(-0.7) - 0.2*(-0.9)
  CHECK(CombineScores(ledger, cfg) == doctest::Approx(-1.65).epsilon(1e-12));

  cfg.ilm_target = IlmTarget::kAttentionOnly;
  // 0.6*(-1.3 - 0.2*(-0.9)) + 0.4*(-2.1) + 0.3*(-0.7)
  CHECK(CombineScores(ledger, cfg) == doctest::Approx(-1.722).epsilon(1e-12));

  // The two targets differ by exactly gamma * lambda_ilm * ilm.
  Rng rng(204);
  for (int i = 0; i < 50; ++i) {
    ScoreLedger r;
    r.att = rng.Uniform() * -5.0;
    r.ctc = rng.Uniform() * -5.0;
    r.lm = rng.Uniform() * -5.0;
    r.ilm = rng.Uniform() * -5.0;
    FusionConfig c;
    c.lambda_lm = rng.Uniform();
    c.lambda_ilm = rng.Uniform();
    c.ctc_weight = rng.Uniform();
    c.ilm_target = IlmTarget::kJoint;
    const double joint = CombineScores(r, c);
    c.ilm_target = IlmTarget::kAttentionOnly;
    const double att_only = CombineScores(r, c);
    CHECK(joint - att_only ==
          doctest::Approx(-c.ctc_weight * c.lambda_ilm * r.ilm).epsilon(1e-12));
  }
}

TEST_CASE("combine_scores: zero-weight sources are skipped, not multiplied") {
  // A source with weight zero must not poison the combination even when its
  // ledger entry is -inf or NaN (an unresolved scorer).
  ScoreLedger ledger;
  ledger.att = -2.0;
  ledger.ctc = kNegInf;
  ledger.lm = std::numeric_limits<double>::quiet_NaN();
  ledger.ilm = std::numeric_limits<double>::quiet_NaN();

  FusionConfig cfg;
  cfg.lambda_lm = 0.0;
  cfg.lambda_ilm = 0.0;
  cfg.ctc_weight = 0.0;
  for (IlmTarget target : {IlmTarget::kAttentionOnly, IlmTarget::kJoint}) {
    cfg.ilm_target = target;
    CHECK(CombineScores(ledger, cfg) == -2.0);
  }

  // lambda_ilm = 0 makes the two targets bitwise identical.
  Rng rng(205);
  for (int i = 0; i < 50; ++i) {
    ScoreLedger r;
    r.att = rng.Uniform() * -5.0;
    r.ctc = rng.Uniform() * -5.0;
    r.lm = rng.Uniform() * -5.0;
    r.ilm = rng.Uniform() * -5.0;
    FusionConfig c;
    c.lambda_lm = 0.4;
    c.lambda_ilm = 0.0;
    c.ctc_weight = 0.3;
    c.ilm_target = IlmTarget::kAttentionOnly;
    const double a = CombineScores(r, c);
    c.ilm_target = IlmTarget::kJoint;
    CHECK(a == CombineScores(r, c));
  }
}

TEST_CASE("fusion_config: validation rejects out-of-range settings") {
  auto with = [](const std::function<void(FusionConfig*)>& mutate) {
    FusionConfig cfg;
    mutate(&cfg);
    return cfg;
  };
  CHECK_THROWS_WITH_AS(with([](FusionConfig* c) { c->lambda_lm = -0.1; }).Validate(),
                       doctest::Contains("lambda_lm"), Error);
  CHECK_THROWS_WITH_AS(with([](FusionConfig* c) { c->lambda_ilm = -1.0; }).Validate(),
                       doctest::Contains("lambda_ilm"), Error);
  CHECK_THROWS_WITH_AS(with([](FusionConfig* c) { c->ctc_weight = 1.5; }).Validate(),
                       doctest::Contains("ctc_weight"), Error);
  CHECK_THROWS_WITH_AS(with([](FusionConfig* c) { c->beam_size = 0; }).Validate(),
                       doctest::Contains("beam_size"), Error);
  CHECK_THROWS_WITH_AS(with([](FusionConfig* c) { c->max_len_ratio = 0.0; }).Validate(),
                       doctest::Contains("max_len_ratio"), Error);
  CHECK_THROWS_WITH_AS(
      with([](FusionConfig* c) { c->length_penalty = kNegInf; }).Validate(),
      doctest::Contains("length_penalty"), Error);
}

TEST_CASE("fused_scorer: initial and expanded hypothesis contract") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(6, 206);
  FusionConfig cfg;
  cfg.ctc_weight = 0.4;
  cfg.lambda_lm = 0.4;
  cfg.lambda_ilm = 0.2;
  FusedScorer scorer(stack.Models(), enc, cfg);

  CHECK(scorer.t_enc() == 3);
  CHECK(scorer.candidates() == std::vector<int>{3, 4, 5});

  const Hypothesis init = scorer.Initial();
  CHECK(init.tokens.empty());
  CHECK(init.ledger.att == 0.0);
  CHECK(init.ledger.ctc == 0.0);
  CHECK(init.ledger.lm == 0.0);
  CHECK(init.ledger.ilm == 0.0);
  CHECK(init.combined == 0.0);
  CHECK_FALSE(init.finished);

  const std::vector<Hypothesis> exts = scorer.Expand(init);
  REQUIRE(exts.size() == 3u);
  for (size_t i = 0; i < exts.size(); ++i) {
    CHECK(exts[i].tokens == std::vector<int>{scorer.candidates()[i]});
    CHECK(exts[i].ledger.att < 0.0);
    CHECK(exts[i].combined == CombineScores(exts[i].ledger, cfg));
  }

  const Hypothesis done = scorer.Finish(exts[0]);
  CHECK(done.finished);
  CHECK(done.tokens == exts[0].tokens);
  CHECK(done.ledger.att < exts[0].ledger.att);  // eos term is a log-prob < 0
  CHECK_FALSE(done.dec.has_value());

  CHECK_THROWS_WITH_AS(scorer.Expand(done), doctest::Contains("finished"), Error);
  CHECK_THROWS_WITH_AS(scorer.Finish(done), doctest::Contains("finished"), Error);
  CHECK_THROWS_WITH_AS(scorer.Finish(init), doctest::Contains("empty sequence"), Error);
}

TEST_CASE("beam_search: beam 1 equals an independent greedy recomputation") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(8, 207);  // T_enc = 4
  FusionConfig cfg;
  cfg.ctc_weight = 0.0;
  cfg.lambda_lm = 0.0;
  cfg.lambda_ilm = 0.0;
  cfg.beam_size = 1;

  // Greedy walk via the full-prefix decoder path: at each step take the
  // best content token; a candidate final exists for every prefix length.
  std::vector<int> prefix;
  double att_sum = 0.0;
  std::vector<int> best_tokens;
  double best_combined = kNegInf;
  for (int len = 1; len <= 4; ++len) {
    const Tensor row = DecoderStep(stack.asr, prefix, &enc, CrossMode::kFull, nullptr);
    int arg = -1;
    for (int c : stack.vocab.ContentIds()) {
      if (arg < 0 || row.at(0, c) > row.at(0, arg)) arg = c;
    }
    att_sum += row.at(0, arg);
    prefix.push_back(arg);
    const Tensor next = DecoderStep(stack.asr, prefix, &enc, CrossMode::kFull, nullptr);
    const double combined = att_sum + next.at(0, Vocab::kEosId);
    if (combined > best_combined ||
        (combined == best_combined && prefix < best_tokens)) {
      best_combined = combined;
      best_tokens = prefix;
    }
  }

  const std::vector<Hypothesis> nbest = BeamSearch({&stack.asr, nullptr, nullptr}, enc, cfg);
  REQUIRE(nbest.size() == 1u);
  CHECK(nbest[0].tokens == best_tokens);
  CHECK(nbest[0].combined == best_combined);
}

TEST_CASE("beam_search: a full-width beam reproduces exhaustive search") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(6, 208);  // T_enc = 3, max_len = 3

  FusionConfig base;
  base.beam_size = 27;  // >= alive prefixes at any depth: nothing is pruned
  base.max_len_ratio = 1.0;

  std::vector<FusionConfig> grid;
  {
    FusionConfig c = base;  // attention + CTC only
    c.ctc_weight = 0.4;
    grid.push_back(c);
    c.lambda_lm = 0.4;  // shallow fusion
    grid.push_back(c);
    c.lambda_ilm = 0.3;  // ILME, attention-only target
    grid.push_back(c);
    c.ilm_target = IlmTarget::kJoint;  // ILME, joint target
    grid.push_back(c);
    FusionConfig a = base;  // attention-only branch, no CTC
    a.ctc_weight = 0.0;
    a.lambda_lm = 0.2;
    grid.push_back(a);
  }

  for (const FusionConfig& cfg : grid) {
    CAPTURE(cfg.ctc_weight);
    CAPTURE(cfg.lambda_lm);
    CAPTURE(cfg.lambda_ilm);
    const std::vector<Hypothesis> nbest = BeamSearch(stack.Models(), enc, cfg);
    REQUIRE(!nbest.empty());
    const Hypothesis oracle = ExhaustiveSearch(stack.Models(), enc, cfg, 3);
    CHECK(nbest[0].tokens == oracle.tokens);
    CHECK(nbest[0].combined == doctest::Approx(oracle.combined).epsilon(1e-9));
    CHECK(nbest[0].ledger.att == doctest::Approx(oracle.ledger.att).epsilon(1e-9));
    if (cfg.ctc_weight != 0.0) {
      CHECK(nbest[0].ledger.ctc == doctest::Approx(oracle.ledger.ctc).epsilon(1e-9));
    }
    if (cfg.lambda_lm != 0.0) {
      CHECK(nbest[0].ledger.lm == doctest::Approx(oracle.ledger.lm).epsilon(1e-9));
    }
    if (cfg.lambda_ilm != 0.0) {
      CHECK(nbest[0].ledger.ilm == doctest::Approx(oracle.ledger.ilm).epsilon(1e-9));
    }
  }
}

TEST_CASE("beam_search: ledgers are recomputable from full-sequence scorers") {
  // Two content tokens keep the CTC grid within the brute-force oracle's
  // enumeration budget (6 symbol columns).
  Stack stack;
  stack.vocab = Vocab::Build({"A", "B"}, {});
  AsrConfig asr_cfg = stack.asr.cfg;
  asr_cfg.vocab_size = stack.vocab.size();
  stack.asr = AsrModel::NewRandom(asr_cfg, stack.vocab, 230);
  LmConfig lm_cfg = stack.lm.cfg;
  lm_cfg.vocab_size = stack.vocab.size();
  stack.lm = LmModel::NewRandom(lm_cfg, stack.vocab, 231);
  stack.ilm = AttachIlm(stack.asr, CrossMode::kLscl, 8, 232);

  const EncoderOutput enc = stack.Encode(6, 209);
  const Tensor ctc_logp = CtcLogPosteriors(stack.asr, enc);
  const int blank = stack.vocab.blank_id();

  for (double lambda_ilm : {0.0, 0.1, 0.3}) {
    FusionConfig cfg;
    cfg.ctc_weight = 0.4;
    cfg.lambda_lm = 0.4;
    cfg.lambda_ilm = lambda_ilm;
    cfg.beam_size = 8;
    const std::vector<Hypothesis> nbest = BeamSearch(stack.Models(), enc, cfg);
    REQUIRE(!nbest.empty());

    for (size_t i = 0; i < std::min<size_t>(nbest.size(), 3); ++i) {
      const Hypothesis& h = nbest[i];
      CAPTURE(lambda_ilm);
      CAPTURE(i);
      CHECK(h.ledger.att ==
            doctest::Approx(
                AttentionSequenceLogProb(stack.asr, &enc, CrossMode::kFull, nullptr, h.tokens))
                .epsilon(1e-9));
      // CTC against the brute-force alignment enumeration.
      const double exact = oracles::CtcExactProb(ctc_logp, h.tokens, blank);
      if (exact == 0.0) {
        CHECK(h.ledger.ctc == kNegInf);
      } else {
        CHECK(h.ledger.ctc == doctest::Approx(std::log(exact)).epsilon(1e-9));
      }
      CHECK(h.ledger.lm ==
            doctest::Approx(LmSequenceLogProb(stack.lm, h.tokens)).epsilon(1e-9));
      if (lambda_ilm != 0.0) {
        CHECK(h.ledger.ilm ==
              doctest::Approx(IlmSequenceLogProb(stack.asr, stack.ilm, h.tokens)).epsilon(1e-9));
      } else {
        CHECK(h.ledger.ilm == 0.0);
      }
      CHECK(h.combined == CombineScores(h.ledger, cfg));
    }

    // Ranking: non-increasing combined score, ties lexicographic, all
    // sequences distinct.
    for (size_t i = 1; i < nbest.size(); ++i) {
      const bool ordered = nbest[i - 1].combined > nbest[i].combined ||
                           (nbest[i - 1].combined == nbest[i].combined &&
                            nbest[i - 1].tokens < nbest[i].tokens);
      CHECK(ordered);
    }
  }
}

TEST_CASE("beam_search: lambda_ilm = 0 is bitwise shallow fusion") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(6, 210);
  FusionConfig cfg;
  cfg.ctc_weight = 0.4;
  cfg.lambda_lm = 0.4;
  cfg.lambda_ilm = 0.0;
  cfg.beam_size = 4;

  // The ILM estimate stays attached; a zero weight must make it invisible.
  const std::vector<Hypothesis> via_beam = BeamSearch(stack.Models(), enc, cfg);
  const std::vector<Hypothesis> via_shallow = ShallowFusionBeamSearch(stack.Models(), enc, cfg);
  REQUIRE(via_beam.size() == via_shallow.size());
  for (size_t i = 0; i < via_beam.size(); ++i) {
    CHECK(via_beam[i].tokens == via_shallow[i].tokens);
    CHECK(via_beam[i].combined == via_shallow[i].combined);
    CHECK(via_beam[i].ledger.att == via_shallow[i].ledger.att);
    CHECK(via_beam[i].ledger.ctc == via_shallow[i].ledger.ctc);
    CHECK(via_beam[i].ledger.lm == via_shallow[i].ledger.lm);
    CHECK(via_beam[i].ledger.ilm == 0.0);
    CHECK(via_shallow[i].ledger.ilm == 0.0);
  }
}

TEST_CASE("beam_search: zero fusion weights reduce to the acoustic baseline") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(6, 211);
  FusionConfig cfg;
  cfg.ctc_weight = 0.4;
  cfg.beam_size = 4;

  const std::vector<Hypothesis> fused = BeamSearch(stack.Models(), enc, cfg);
  const std::vector<Hypothesis> bare = BeamSearch({&stack.asr, nullptr, nullptr}, enc, cfg);
  REQUIRE(fused.size() == bare.size());
  for (size_t i = 0; i < fused.size(); ++i) {
    CHECK(fused[i].tokens == bare[i].tokens);
    CHECK(fused[i].combined == bare[i].combined);
    CHECK(fused[i].ledger.lm == 0.0);
    CHECK(fused[i].ledger.ilm == 0.0);
  }
}

TEST_CASE("beam_search: hypotheses respect the length bound") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(8, 212);  // T_enc = 4

  FusionConfig cfg;
  cfg.ctc_weight = 0.4;
  cfg.beam_size = 8;
  cfg.max_len_ratio = 0.5;  // bound = 2 tokens
  for (const Hypothesis& h : BeamSearch(stack.Models(), enc, cfg)) {
    CHECK(h.tokens.size() >= 1u);
    CHECK(h.tokens.size() <= 2u);
    CHECK(h.finished);
  }

  // A bound that truncates to zero still allows one token.
  const EncoderOutput tiny = stack.Encode(2, 213);  // T_enc = 1
  cfg.max_len_ratio = 0.3;
  const std::vector<Hypothesis> nbest = BeamSearch(stack.Models(), tiny, cfg);
  REQUIRE(!nbest.empty());
  CHECK(nbest.size() <= 8u);
  for (const Hypothesis& h : nbest) CHECK(h.tokens.size() == 1u);
  for (size_t i = 1; i < nbest.size(); ++i) {
    CHECK(nbest[i - 1].tokens != nbest[i].tokens);
  }
}

TEST_CASE("beam_search: configuration errors") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(6, 214);
  FusionConfig cfg;
  cfg.ctc_weight = 0.4;

  CHECK_THROWS_WITH_AS(BeamSearch({nullptr, nullptr, nullptr}, enc, cfg),
                       doctest::Contains("missing ASR model"), Error);

  FusionConfig with_lm = cfg;
  with_lm.lambda_lm = 0.4;
  CHECK_THROWS_WITH_AS(BeamSearch({&stack.asr, nullptr, nullptr}, enc, with_lm),
                       doctest::Contains("no external LM"), Error);

  FusionConfig with_ilm = cfg;
  with_ilm.lambda_ilm = 0.2;
  CHECK_THROWS_WITH_AS(BeamSearch({&stack.asr, &stack.lm, nullptr}, enc, with_ilm),
                       doctest::Contains("no ILM estimate"), Error);

  EncoderOutput malformed;
  malformed.h_enc = Tensor();
  malformed.t_in = 0;
  CHECK_THROWS_WITH_AS(BeamSearch(stack.Models(), malformed, cfg),
                       doctest::Contains("malformed encoder output"), Error);

  // External LM over a different vocabulary is rejected up front.
  LmConfig other_cfg;
  other_cfg.d_model = 16;
  other_cfg.heads = 2;
  other_cfg.ffn = 32;
  other_cfg.blocks = 1;
  other_cfg.dropout = 0.0;
  const Vocab other_vocab = Vocab::Build({"A", "B"}, {});
  other_cfg.vocab_size = other_vocab.size();
  const LmModel other_lm = LmModel::NewRandom(other_cfg, other_vocab, 215);
  CHECK_THROWS_WITH_AS(BeamSearch({&stack.asr, &other_lm, nullptr}, enc, with_lm),
                       doctest::Contains("vocab"), Error);
}

TEST_CASE("exhaustive_search: enumeration budget and argument checks") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(6, 216);
  FusionConfig cfg;
  cfg.ctc_weight = 0.4;

  CHECK_THROWS_WITH_AS(ExhaustiveSearch(stack.Models(), enc, cfg, 0),
                       doctest::Contains("max_len"), Error);
  // 3 tokens to length 13 is 3 + 9 + ... + 3^13 > 1e6 sequences.
  CHECK_THROWS_WITH_AS(ExhaustiveSearch(stack.Models(), enc, cfg, 13),
                       doctest::Contains("budget"), Error);
}

TEST_CASE("nbest_to_json: one record per hypothesis with rendered text") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(6, 217);
  FusionConfig cfg;
  cfg.ctc_weight = 0.4;
  cfg.lambda_lm = 0.4;
  cfg.lambda_ilm = 0.2;
  cfg.beam_size = 4;
  const std::vector<Hypothesis> nbest = BeamSearch(stack.Models(), enc, cfg);
  REQUIRE(!nbest.empty());

  const nlohmann::json record = NbestToJson("utt42", nbest, stack.vocab);
  CHECK(record.at("utt_id").get<std::string>() == "utt42");
  const nlohmann::json& arr = record.at("nbest");
  REQUIRE(arr.size() == nbest.size());
  for (size_t i = 0; i < nbest.size(); ++i) {
    CHECK(arr[i].at("tokens").get<std::vector<int>>() == nbest[i].tokens);
    CHECK(arr[i].at("text").get<std::string>() == stack.vocab.Render(nbest[i].tokens));
    CHECK(arr[i].at("att").get<double>() == nbest[i].ledger.att);
    CHECK(arr[i].at("ctc").get<double>() == nbest[i].ledger.ctc);
    CHECK(arr[i].at("lm").get<double>() == nbest[i].ledger.lm);
    CHECK(arr[i].at("ilm").get<double>() == nbest[i].ledger.ilm);
    CHECK(arr[i].at("combined").get<double>() == nbest[i].combined);
  }
}

TEST_CASE("beam_search: length penalty reorders only the final ranking key") {
  const Stack& stack = GetStack();
  const EncoderOutput enc = stack.Encode(6, 218);
  FusionConfig cfg;
  cfg.ctc_weight = 0.4;
  cfg.beam_size = 8;

  const std::vector<Hypothesis> plain = BeamSearch(stack.Models(), enc, cfg);
  cfg.length_penalty = 0.5;
  const std::vector<Hypothesis> rewarded = BeamSearch(stack.Models(), enc, cfg);

  // Per-hypothesis scores are penalty-free; the penalty only reorders.
  for (const Hypothesis& h : rewarded) {
    CHECK(h.combined == CombineScores(h.ledger, cfg));
  }
  // With a positive per-token reward the winner can only get longer.
  REQUIRE(!plain.empty());
  REQUIRE(!rewarded.empty());
  CHECK(rewarded[0].tokens.size() >= plain[0].tokens.size());
  // And the rewarded ranking is sorted by the penalized key.
  for (size_t i = 1; i < rewarded.size(); ++i) {
    const double prev = rewarded[i - 1].combined +
                        0.5 * static_cast<double>(rewarded[i - 1].tokens.size());
    const double cur =
        rewarded[i].combined + 0.5 * static_cast<double>(rewarded[i].tokens.size());
    CHECK(prev >= cur);
  }
}

}  // namespace
}  // namespace ilmefuse
