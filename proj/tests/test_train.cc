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
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "ilmefuse/common.h"
#include "ilmefuse/corpus.h"
#include "ilmefuse/models.h"
#include "ilmefuse/train.h"

namespace ilmefuse {
namespace {

CorpusSpec ToySpec(uint64_t seed, int utterances) {
  CorpusSpec spec;
  spec.seed = seed;
  spec.lang_a_size = 4;
  spec.lang_b_size = 3;
  spec.utterances = utterances;
  spec.min_len = 2;
  spec.max_len = 4;
  spec.noise_sigma = 0.1;
  spec.d_feat = 8;
  return spec;
}

std::vector<TrainUtterance> MakeToyCorpus(const CorpusSpec& spec, const Vocab& vocab) {
  std::vector<Utterance> utts = GenerateTranscripts(spec, vocab);
  const Tensor codebook = BuildCodebook(vocab, spec.d_feat, Rng::DeriveSeed(spec.seed, "cb"));
  SynthesizeCorpusFeatures(spec, codebook, &utts);
  std::vector<TrainUtterance> out;
  out.reserve(utts.size());
  for (Utterance& u : utts) {
    out.push_back({u.utt_id, u.tokens, std::move(u.features)});
  }
  return out;
}

AsrConfig ToyAsrConfig(const CorpusSpec& spec, int vocab_size) {
  AsrConfig cfg;
  cfg.d_feat = spec.d_feat;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.ffn = 32;
  cfg.enc_blocks = 1;
  cfg.dec_blocks = 1;
  cfg.subsample = 2;
  cfg.dropout = 0.0;
  cfg.vocab_size = vocab_size;
  return cfg;
}

TEST_CASE("AdamNoam: warmup schedule hand values") {
  AdamNoam opt(/*d_model=*/4, /*factor=*/2.0, /*warmup_steps=*/100);
  // factor * d^-0.5 * min(s^-0.5, s * warmup^-1.5)
  CHECK(opt.LearningRate(1) == doctest::Approx(2.0 * 0.5 * 1e-3).epsilon(1e-12));
  CHECK(opt.LearningRate(100) == doctest::Approx(2.0 * 0.5 * 0.1).epsilon(1e-12));
  CHECK(opt.LearningRate(400) == doctest::Approx(2.0 * 0.5 * 0.05).epsilon(1e-12));
  // Warmup region is linear, decay region is s^-0.5.
  CHECK(opt.LearningRate(50) == doctest::Approx(opt.LearningRate(1) * 50).epsilon(1e-12));
  CHECK_THROWS_AS(opt.LearningRate(0), Error);
}

TEST_CASE("AdamNoam: first step applies bias-corrected Adam exactly") {
  ParamStore store;
  store.Create("w", 1, 1).value.at(0, 0) = 1.0;
  AdamNoam opt(/*d_model=*/4, /*factor=*/1.0, /*warmup_steps=*/10);
  Tensor g(1, 1);
  g.at(0, 0) = 2.0;
  opt.Step(&store, {{"w", g}});
  // After bias correction the first update is lr * g / (|g| + eps).
  const double lr = opt.LearningRate(1);
  const double want = 1.0 - lr * 2.0 / (2.0 + 1e-9);
  CHECK(store.Value("w").at(0, 0) == doctest::Approx(want).epsilon(1e-12));
  CHECK(opt.steps() == 1);
}

TEST_CASE("AdamNoam: frozen or unknown parameters reject gradients") {
  ParamStore store;
  store.Create("live", 1, 1);
  store.Create("ice", 1, 1, /*trainable=*/false);
  AdamNoam opt(4, 1.0, 10);
  Tensor g(1, 1);
  g.at(0, 0) = 1.0;
  CHECK_THROWS_WITH_AS(opt.Step(&store, {{"ice", g}}), doctest::Contains("frozen"), Error);
  CHECK_THROWS_WITH_AS(opt.Step(&store, {{"ghost", g}}), doctest::Contains("unknown"), Error);
  // Shape mismatches are caught too.
  CHECK_THROWS_AS(opt.Step(&store, {{"live", Tensor(2, 2)}}), Error);
}

TEST_CASE("train_asr: zero epochs is a no-op") {
  const CorpusSpec spec = ToySpec(51, 6);
  const Vocab vocab = BuildVocabForSpec(spec);
  AsrModel model = AsrModel::NewRandom(ToyAsrConfig(spec, vocab.size()), vocab, 52);
  const uint64_t before = model.params.Checksum();

  TrainSchedule schedule;
  schedule.epochs = 0;
  const TrainResult result = TrainAsr(&model, {}, {}, schedule);
  CHECK(model.params.Checksum() == before);
  CHECK(result.averaged.Checksum() == before);
  CHECK(result.log.entries.empty());
}

TEST_CASE("train_asr: loss log holds epochs x {train,valid} x {ctc,att}") {
  const CorpusSpec spec = ToySpec(53, 6);
  const Vocab vocab = BuildVocabForSpec(spec);
  const auto corpus = MakeToyCorpus(spec, vocab);
  AsrModel model = AsrModel::NewRandom(ToyAsrConfig(spec, vocab.size()), vocab, 54);

  TrainSchedule schedule;
  schedule.epochs = 3;
  schedule.warmup_steps = 10;
  schedule.dropout = 0.0;
  schedule.seed = 55;
  const TrainResult result = TrainAsr(&model, corpus, corpus, schedule);

  CHECK(result.log.entries.size() == 3u * 2u * 2u);
  for (int epoch = 1; epoch <= 3; ++epoch) {
    for (const char* split : {"train", "valid"}) {
      for (const char* criterion : {"ctc", "att"}) {
        CHECK(std::isfinite(result.log.Find(epoch, split, criterion)));
      }
    }
  }
}

TEST_CASE("train_asr: 200 epochs on 20 utterances overfits hard") {
  const CorpusSpec spec = ToySpec(56, 20);
  const Vocab vocab = BuildVocabForSpec(spec);
  const auto corpus = MakeToyCorpus(spec, vocab);
  const CorpusSpec valid_spec = ToySpec(57, 4);
  const auto valid = MakeToyCorpus(valid_spec, vocab);
  AsrModel model = AsrModel::NewRandom(ToyAsrConfig(spec, vocab.size()), vocab, 58);

  TrainSchedule schedule;
  schedule.epochs = 200;
  schedule.batch_size = 4;
  schedule.warmup_steps = 100;
  schedule.lr_factor = 2.0;
  schedule.dropout = 0.0;
  schedule.ctc_weight = 0.3;
  schedule.seed = 59;
  const TrainResult result = TrainAsr(&model, corpus, valid, schedule);

  auto joint = [&](int epoch, const char* split) {
    return schedule.ctc_weight * result.log.Find(epoch, split, "ctc") +
           (1.0 - schedule.ctc_weight) * result.log.Find(epoch, split, "att");
  };
  const double first = joint(1, "train");
  const double last = joint(200, "train");
  MESSAGE("train joint loss: epoch 1 = ", first, ", epoch 200 = ", last);
  CHECK(last < 0.1 * first);
  // The averaged decoding checkpoint has the same parameter set.
  CHECK(result.averaged.Names() == model.params.Names());
}

TEST_CASE("train_asr: non-finite loss aborts naming the step and utterance") {
  const CorpusSpec spec = ToySpec(60, 4);
  const Vocab vocab = BuildVocabForSpec(spec);
  const auto corpus = MakeToyCorpus(spec, vocab);
  AsrModel model = AsrModel::NewRandom(ToyAsrConfig(spec, vocab.size()), vocab, 61);
  // Poison the sos embedding: every teacher-forced input starts with it.
  model.params.GetMutable("embed.table").value.at(Vocab::kSosId, 0) =
      std::numeric_limits<double>::quiet_NaN();

  TrainSchedule schedule;
  schedule.epochs = 1;
  schedule.dropout = 0.0;
  try {
    TrainAsr(&model, corpus, corpus, schedule);
    FAIL("expected divergence error");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("diverged at step") != std::string::npos);
    CHECK(msg.find("utterance '") != std::string::npos);
  }
}

TEST_CASE("train_asr: a CTC-infeasible utterance is reported by id") {
  const CorpusSpec spec = ToySpec(62, 3);
  const Vocab vocab = BuildVocabForSpec(spec);
  auto corpus = MakeToyCorpus(spec, vocab);
  // Truncate one utterance's features so its transcript cannot align.
  TrainUtterance& broken = corpus[1];
  while (static_cast<int>(broken.tokens.size()) < 3) broken.tokens.push_back(3);
  broken.features = Tensor(4, spec.d_feat);  // 2 CTC frames < 3 labels
  AsrModel model = AsrModel::NewRandom(ToyAsrConfig(spec, vocab.size()), vocab, 63);

  TrainSchedule schedule;
  schedule.epochs = 1;
  schedule.dropout = 0.0;
  try {
    TrainAsr(&model, corpus, corpus, schedule);
    FAIL("expected infeasibility error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(broken.utt_id) != std::string::npos);
  }
}

TEST_CASE("train_lm: zero epochs is a no-op") {
  const CorpusSpec spec = ToySpec(64, 4);
  const Vocab vocab = BuildVocabForSpec(spec);
  LmConfig cfg;
  cfg.d_model = 8;
  cfg.heads = 2;
  cfg.ffn = 16;
  cfg.blocks = 1;
  cfg.dropout = 0.0;
  cfg.vocab_size = vocab.size();
  LmModel lm = LmModel::NewRandom(cfg, vocab, 65);
  const uint64_t before = lm.params.Checksum();

  TrainSchedule schedule;
  schedule.epochs = 0;
  const TrainResult result = TrainLm(&lm, {}, {}, schedule);
  CHECK(lm.params.Checksum() == before);
  CHECK(result.averaged.Checksum() == before);
}

TEST_CASE("train_lm: one repeated token drives perplexity to 1") {
  const CorpusSpec spec = ToySpec(66, 4);
  const Vocab vocab = BuildVocabForSpec(spec);
  LmConfig cfg;
  cfg.d_model = 8;
  cfg.heads = 2;
  cfg.ffn = 16;
  cfg.blocks = 1;
  cfg.dropout = 0.0;
  cfg.vocab_size = vocab.size();
  LmModel lm = LmModel::NewRandom(cfg, vocab, 67);

  const std::vector<std::vector<int>> text(8, std::vector<int>{Vocab::kFirstContentId});
  TrainSchedule schedule;
  schedule.epochs = 300;
  schedule.batch_size = 8;
  schedule.warmup_steps = 25;
  schedule.lr_factor = 1.0;
  schedule.dropout = 0.0;
  schedule.seed = 68;
  const TrainResult result = TrainLm(&lm, text, text, schedule);

  const double ppl = std::exp(result.log.Find(300, "valid", "lm"));
  MESSAGE("degenerate-corpus perplexity = ", ppl);
  CHECK(ppl < 1.01);
}

TEST_CASE("train_lm: held-out perplexity decreases over the first 10 epochs") {
  const CorpusSpec spec = ToySpec(69, 40);
  const Vocab vocab = BuildVocabForSpec(spec);
  std::vector<std::vector<int>> train_text, valid_text;
  for (const Utterance& u : GenerateTranscripts(spec, vocab)) {
    (train_text.size() < 32 ? train_text : valid_text).push_back(u.tokens);
  }
  REQUIRE(valid_text.size() == 8);

  LmConfig cfg;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.ffn = 32;
  cfg.blocks = 1;
  cfg.dropout = 0.0;
  cfg.vocab_size = vocab.size();
  LmModel lm = LmModel::NewRandom(cfg, vocab, 70);

  TrainSchedule schedule;
  schedule.epochs = 10;
  schedule.batch_size = 8;
  schedule.warmup_steps = 20;
  schedule.lr_factor = 1.0;
  schedule.dropout = 0.0;
  schedule.seed = 71;
  const TrainResult result = TrainLm(&lm, train_text, valid_text, schedule);

  const double first = std::exp(result.log.Find(1, "valid", "lm"));
  const double last = std::exp(result.log.Find(10, "valid", "lm"));
  MESSAGE("held-out perplexity: epoch 1 = ", first, ", epoch 10 = ", last);
  CHECK(last < first);
  CHECK(result.log.entries.size() == 10u * 2u);
}

TEST_CASE("loss log: CSV round trip preserves every entry") {
  LossLog log;
  log.Append(1, "train", "ctc", 12.5);
  log.Append(1, "train", "att", 0.1234567890123456789);
  log.Append(1, "valid", "ctc", 1e-17);
  log.Append(2, "valid", "att", -3.75);

  const std::string path = "loss_log_roundtrip_test.csv";
  log.WriteCsv(path);
  const LossLog back = LossLog::ReadCsv(path);
  std::remove(path.c_str());

  REQUIRE(back.entries.size() == log.entries.size());
  for (size_t i = 0; i < log.entries.size(); ++i) {
    CHECK(back.entries[i].epoch == log.entries[i].epoch);
    CHECK(back.entries[i].split == log.entries[i].split);
    CHECK(back.entries[i].criterion == log.entries[i].criterion);
    CHECK(back.entries[i].loss == log.entries[i].loss);  // %.17g survives exactly
  }
}

TEST_CASE("loss log: missing entries and malformed files are errors") {
  LossLog log;
  log.Append(1, "train", "ctc", 1.0);
  CHECK_THROWS_AS(log.Find(2, "train", "ctc"), Error);
  CHECK_THROWS_AS(LossLog::ReadCsv("does_not_exist.csv"), Error);
}

TEST_CASE("schedule validation rejects out-of-range fields") {
  TrainSchedule s;
  s.epochs = -1;
  CHECK_THROWS_AS(s.Validate(), Error);
  s = {};
  s.warmup_steps = 0;
  CHECK_THROWS_AS(s.Validate(), Error);
  s = {};
  s.dropout = 1.0;
  CHECK_THROWS_AS(s.Validate(), Error);
  s = {};
  s.ctc_weight = 1.5;
  CHECK_THROWS_AS(s.Validate(), Error);
  s = {};
  s.average_top_k = 0;
  CHECK_THROWS_AS(s.Validate(), Error);
}

TEST_CASE("train_asr: empty sets with positive epochs are errors") {
  const CorpusSpec spec = ToySpec(72, 2);
  const Vocab vocab = BuildVocabForSpec(spec);
  const auto corpus = MakeToyCorpus(spec, vocab);
  AsrModel model = AsrModel::NewRandom(ToyAsrConfig(spec, vocab.size()), vocab, 73);
  TrainSchedule schedule;
  schedule.epochs = 1;
  CHECK_THROWS_AS(TrainAsr(&model, {}, corpus, schedule), Error);
  CHECK_THROWS_AS(TrainAsr(&model, corpus, {}, schedule), Error);
}

}  // namespace
}  // namespace ilmefuse
