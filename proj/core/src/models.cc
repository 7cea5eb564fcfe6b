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

#include "ilmefuse/models.h"

#include <cmath>

#include "ilmefuse/kernels.h"

namespace ilmefuse {

namespace {

// Large negative logit standing in for -inf in attention masks; softmax
// turns it into an exact 0 weight without the NaN hazards of real -inf.
constexpr double kMaskedLogit = -1e30;

Tensor CausalMask(int rows, int cols) {
  Tensor m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = i + 1; j < cols; ++j) m.at(i, j) = kMaskedLogit;
  }
  return m;
}

Var DropoutVar(Tape* tape, Var x, TrainCtx* ctx) {
  if (ctx == nullptr || ctx->dropout <= 0.0) return x;
  const double p = ctx->dropout;
  Tensor mask(x.value().rows(), x.value().cols());
  for (int i = 0; i < mask.size(); ++i) {
    mask[i] = ctx->rng->Uniform() < p ? 0.0 : 1.0 / (1.0 - p);
  }
  return tape->Mul(x, tape->Constant(std::move(mask)));
}

Var LnVar(Tape* tape, const ParamStore& ps, const std::string& prefix, Var x) {
  return tape->LayerNorm(x, tape->Param(ps, prefix + ".g"), tape->Param(ps, prefix + ".b"));
}

Var ProjVar(Tape* tape, const ParamStore& ps, const std::string& w, const std::string& b,
            Var x) {
  return tape->Add(tape->MatMul(x, tape->Param(ps, w)), tape->Param(ps, b));
}

Var FfnVar(Tape* tape, const ParamStore& ps, const std::string& prefix, Var x) {
  Var h = tape->Relu(ProjVar(tape, ps, prefix + ".w1", prefix + ".b1", x));
  return ProjVar(tape, ps, prefix + ".w2", prefix + ".b2", h);
}

Var MhaVar(Tape* tape, const ParamStore& ps, const std::string& prefix, Var q_in, Var kv_in,
           bool causal, int heads) {
  Var q = ProjVar(tape, ps, prefix + ".wq", prefix + ".bq", q_in);
  Var k = ProjVar(tape, ps, prefix + ".wk", prefix + ".bk", kv_in);
  Var v = ProjVar(tape, ps, prefix + ".wv", prefix + ".bv", kv_in);
  const int d = q.value().cols();
  Check(d % heads == 0, "attention width ", d, " not divisible by ", heads, " heads");
  const int dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const int tq = q.value().rows(), tk = k.value().rows();
  Var ctx;
  for (int h = 0; h < heads; ++h) {
    Var qh = tape->Slice(q, 1, h * dk, dk);
    Var kh = tape->Slice(k, 1, h * dk, dk);
    Var vh = tape->Slice(v, 1, h * dk, dk);
    Var scores = tape->Scale(tape->MatMul(qh, tape->Transpose(kh)), scale);
    if (causal) scores = tape->Add(scores, tape->Constant(CausalMask(tq, tk)));
    Var ctxh = tape->MatMul(tape->Softmax(scores), vh);
    ctx = h == 0 ? ctxh : tape->Concat(ctx, ctxh, 1);
  }
  return ProjVar(tape, ps, prefix + ".wo", prefix + ".bo", ctx);
}

void InitLn(ParamStore* ps, const std::string& prefix, int d) {
  Param& g = ps->Create(prefix + ".g", 1, d);
  for (int i = 0; i < d; ++i) g.value[i] = 1.0;
  ps->Create(prefix + ".b", 1, d);
}

void InitLinear(ParamStore* ps, Rng* rng, const std::string& w, const std::string& b, int in,
                int out) {
  Param& pw = ps->Create(w, in, out);
  const double s = std::sqrt(6.0 / (in + out));
  for (int i = 0; i < pw.value.size(); ++i) pw.value[i] = (2.0 * rng->Uniform() - 1.0) * s;
  ps->Create(b, 1, out);
}

void InitMha(ParamStore* ps, Rng* rng, const std::string& prefix, int d) {
  InitLinear(ps, rng, prefix + ".wq", prefix + ".bq", d, d);
  InitLinear(ps, rng, prefix + ".wk", prefix + ".bk", d, d);
  InitLinear(ps, rng, prefix + ".wv", prefix + ".bv", d, d);
  InitLinear(ps, rng, prefix + ".wo", prefix + ".bo", d, d);
}

void InitFfn(ParamStore* ps, Rng* rng, const std::string& prefix, int d, int ffn) {
  InitLinear(ps, rng, prefix + ".w1", prefix + ".b1", d, ffn);
  InitLinear(ps, rng, prefix + ".w2", prefix + ".b2", ffn, d);
}

void InitEmbedding(ParamStore* ps, Rng* rng, const std::string& name, int vocab, int d) {
  Param& e = ps->Create(name, vocab, d);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < e.value.size(); ++i) e.value[i] = (2.0 * rng->Uniform() - 1.0) * s;
}

std::vector<int> WithSos(const std::vector<int>& tokens) {
  std::vector<int> ids;
  ids.reserve(tokens.size() + 1);
  ids.push_back(Vocab::kSosId);
  ids.insert(ids.end(), tokens.begin(), tokens.end());
  return ids;
}

std::vector<int> WithEos(const std::vector<int>& tokens) {
  std::vector<int> ids(tokens);
  ids.push_back(Vocab::kEosId);
  return ids;
}

}  // namespace

const char* CrossModeName(CrossMode m) {
  switch (m) {
    case CrossMode::kFull: return "full";
    case CrossMode::kOtcl: return "otcl";
    case CrossMode::kLscl: return "lscl";
  }
  return "?";
}

CrossMode CrossModeFromName(const std::string& name) {
  if (name == "full") return CrossMode::kFull;
  if (name == "otcl") return CrossMode::kOtcl;
  if (name == "lscl") return CrossMode::kLscl;
  Fail("unknown cross-attention mode \"", name, "\"");
}

void AsrConfig::Validate() const {
  Check(d_feat >= 1 && d_model >= 2 && heads >= 1 && ffn >= 1, "AsrConfig: bad widths");
  Check(enc_blocks >= 1 && dec_blocks >= 1, "AsrConfig: need at least one block per stack");
  Check(subsample >= 1, "AsrConfig: subsample factor must be >= 1");
  Check(d_model % heads == 0, "AsrConfig: d_model ", d_model, " not divisible by ", heads,
        " heads");
  Check(dropout >= 0.0 && dropout < 1.0, "AsrConfig: dropout outside [0, 1)");
  Check(vocab_size > Vocab::kFirstContentId, "AsrConfig: vocab_size not set");
}

void LmConfig::Validate() const {
  Check(d_model >= 2 && heads >= 1 && ffn >= 1 && blocks >= 1, "LmConfig: bad widths");
  Check(d_model % heads == 0, "LmConfig: d_model ", d_model, " not divisible by ", heads,
        " heads");
  Check(dropout >= 0.0 && dropout < 1.0, "LmConfig: dropout outside [0, 1)");
  Check(vocab_size > Vocab::kFirstContentId, "LmConfig: vocab_size not set");
}

Tensor PositionEncoding(int start, int count, int d_model) {
  Tensor pe(count, d_model);
  for (int r = 0; r < count; ++r) {
    const double pos = start + r;
    for (int j = 0; j + 1 < d_model; j += 2) {
      const double rate = std::pow(10000.0, -static_cast<double>(j) / d_model);
      pe.at(r, j) = std::sin(pos * rate);
      pe.at(r, j + 1) = std::cos(pos * rate);
    }
    if (d_model % 2 == 1) {
      const double rate = std::pow(10000.0, -static_cast<double>(d_model - 1) / d_model);
      pe.at(r, d_model - 1) = std::sin(pos * rate);
    }
  }
  return pe;
}

AsrModel AsrModel::NewRandom(const AsrConfig& cfg, const Vocab& vocab, uint64_t seed) {
  AsrConfig c = cfg;
  c.vocab_size = vocab.size();
  c.Validate();
  AsrModel model{c, vocab, {}};
  ParamStore* ps = &model.params;
  Rng rng(seed);
  InitEmbedding(ps, &rng, "embed.table", c.vocab_size, c.d_model);
  InitLinear(ps, &rng, "enc.in.w", "enc.in.b", c.d_feat, c.d_model);
  for (int i = 0; i < c.enc_blocks; ++i) {
    const std::string p = StrCat("enc.", i);
    InitLn(ps, p + ".self_ln", c.d_model);
    InitMha(ps, &rng, p + ".self", c.d_model);
    InitLn(ps, p + ".ffn_ln", c.d_model);
    InitFfn(ps, &rng, p + ".ffn", c.d_model, c.ffn);
  }
  InitLn(ps, "enc.final_ln", c.d_model);
  for (int i = 0; i < c.dec_blocks; ++i) {
    const std::string p = StrCat("dec.", i);
    InitLn(ps, p + ".cross_ln", c.d_model);
    InitMha(ps, &rng, p + ".cross", c.d_model);
    InitLn(ps, p + ".self_ln", c.d_model);
    InitMha(ps, &rng, p + ".self", c.d_model);
    InitLn(ps, p + ".ffn_ln", c.d_model);
    InitFfn(ps, &rng, p + ".ffn", c.d_model, c.ffn);
  }
  InitLn(ps, "dec.final_ln", c.d_model);
  InitLinear(ps, &rng, "dec.out.w", "dec.out.b", c.d_model, c.vocab_size);
  InitLinear(ps, &rng, "ctc.w", "ctc.b", c.d_model, c.vocab_size + 1);
  return model;
}

LmModel LmModel::NewRandom(const LmConfig& cfg, const Vocab& vocab, uint64_t seed) {
  LmConfig c = cfg;
  c.vocab_size = vocab.size();
  c.Validate();
  LmModel model{c, vocab, {}};
  ParamStore* ps = &model.params;
  Rng rng(seed);
  InitEmbedding(ps, &rng, "lm.embed.table", c.vocab_size, c.d_model);
  for (int i = 0; i < c.blocks; ++i) {
    const std::string p = StrCat("lm.", i);
    InitLn(ps, p + ".self_ln", c.d_model);
    InitMha(ps, &rng, p + ".self", c.d_model);
    InitLn(ps, p + ".ffn_ln", c.d_model);
    InitFfn(ps, &rng, p + ".ffn", c.d_model, c.ffn);
  }
  InitLn(ps, "lm.final_ln", c.d_model);
  InitLinear(ps, &rng, "lm.out.w", "lm.out.b", c.d_model, c.vocab_size);
  return model;
}

Var BuildEncoder(Tape* tape, const AsrModel& model, const Tensor& features, TrainCtx* ctx) {
  const AsrConfig& cfg = model.cfg;
  Check(features.rows() >= 1, "encode: empty feature input");
  Check(features.cols() == cfg.d_feat, "encode: features are ", features.cols(),
        "-dim, model expects ", cfg.d_feat);
  Check(features.AllFinite(), "encode: non-finite feature values");

  const int t_enc = (features.rows() + cfg.subsample - 1) / cfg.subsample;
  Tensor sub(t_enc, cfg.d_feat);
  for (int i = 0; i < t_enc; ++i) {
    for (int j = 0; j < cfg.d_feat; ++j) sub.at(i, j) = features.at(i * cfg.subsample, j);
  }

  const ParamStore& ps = model.params;
  Var x = ProjVar(tape, ps, "enc.in.w", "enc.in.b", tape->Constant(std::move(sub)));
  x = tape->Add(x, tape->Constant(PositionEncoding(0, t_enc, cfg.d_model)));
  x = DropoutVar(tape, x, ctx);
  for (int i = 0; i < cfg.enc_blocks; ++i) {
    const std::string p = StrCat("enc.", i);
    Var s = LnVar(tape, ps, p + ".self_ln", x);
    x = tape->Add(DropoutVar(tape, MhaVar(tape, ps, p + ".self", s, s, false, cfg.heads), ctx),
                  x);
    Var f = LnVar(tape, ps, p + ".ffn_ln", x);
    x = tape->Add(DropoutVar(tape, FfnVar(tape, ps, p + ".ffn", f), ctx), x);
  }
  return LnVar(tape, ps, "enc.final_ln", x);
}

Var BuildCtcLogProbs(Tape* tape, const AsrModel& model, Var h_enc) {
  return tape->LogSoftmax(ProjVar(tape, model.params, "ctc.w", "ctc.b", h_enc));
}

Var BuildDecoderLogProbs(Tape* tape, const AsrModel& model, Var h_enc, CrossMode mode,
                         const ParamStore* ilm, const std::vector<int>& input_ids,
                         TrainCtx* ctx, DecoderProbe* probe) {
  const AsrConfig& cfg = model.cfg;
  Check(!input_ids.empty(), "decoder: empty input");
  for (int id : input_ids) {
    Check(id >= 0 && id < cfg.vocab_size, "decoder: token id ", id, " out of range");
  }
  if (mode == CrossMode::kFull) {
    Check(h_enc.tape() == tape, "decoder: Full mode needs encoder output");
  } else {
    Check(ilm != nullptr, "decoder: ", CrossModeName(mode), " mode needs ILM params");
    Check(mode != CrossMode::kOtcl || ilm->Has("ilm.bias"),
          "decoder: ILM params carry no OTCL bias");
    Check(mode != CrossMode::kLscl || ilm->Has("ilm.ffn.w1"),
          "decoder: ILM params carry no LSCL weights");
  }

  const ParamStore& ps = model.params;
  const int n = static_cast<int>(input_ids.size());
  Var x = tape->Scale(tape->Embed(tape->Param(ps, "embed.table"), input_ids),
                      std::sqrt(static_cast<double>(cfg.d_model)));
  x = tape->Add(x, tape->Constant(PositionEncoding(0, n, cfg.d_model)));
  x = DropoutVar(tape, x, ctx);
  for (int i = 0; i < cfg.dec_blocks; ++i) {
    const std::string p = StrCat("dec.", i);
    Var cr = LnVar(tape, ps, p + ".cross_ln", x);
    Var co;
    switch (mode) {
      case CrossMode::kFull:
        co = MhaVar(tape, ps, p + ".cross", cr, h_enc, false, cfg.heads);
        break;
      case CrossMode::kOtcl:
        co = tape->Add(tape->Constant(Tensor(n, cfg.d_model)), tape->Param(*ilm, "ilm.bias"));
        break;
      case CrossMode::kLscl: {
        Var h = tape->Relu(tape->Add(tape->MatMul(cr, tape->Param(*ilm, "ilm.ffn.w1")),
                                     tape->Param(*ilm, "ilm.ffn.b1")));
        co = tape->Add(tape->MatMul(h, tape->Param(*ilm, "ilm.ffn.w2")),
                       tape->Param(*ilm, "ilm.ffn.b2"));
        break;
      }
    }
    x = tape->Add(DropoutVar(tape, co, ctx), x);
    if (probe != nullptr) probe->cross_out.push_back(x);
    Var s = LnVar(tape, ps, p + ".self_ln", x);
    x = tape->Add(DropoutVar(tape, MhaVar(tape, ps, p + ".self", s, s, true, cfg.heads), ctx),
                  x);
    Var f = LnVar(tape, ps, p + ".ffn_ln", x);
    x = tape->Add(DropoutVar(tape, FfnVar(tape, ps, p + ".ffn", f), ctx), x);
    if (probe != nullptr) probe->block_out.push_back(x);
  }
  x = LnVar(tape, ps, "dec.final_ln", x);
  return tape->LogSoftmax(ProjVar(tape, ps, "dec.out.w", "dec.out.b", x));
}

Var BuildLmLogProbs(Tape* tape, const LmModel& model, const std::vector<int>& input_ids,
                    TrainCtx* ctx) {
  const LmConfig& cfg = model.cfg;
  Check(!input_ids.empty(), "lm: empty input");
  for (int id : input_ids) {
    Check(id >= 0 && id < cfg.vocab_size, "lm: token id ", id, " out of range");
  }
  const ParamStore& ps = model.params;
  const int n = static_cast<int>(input_ids.size());
  Var x = tape->Scale(tape->Embed(tape->Param(ps, "lm.embed.table"), input_ids),
                      std::sqrt(static_cast<double>(cfg.d_model)));
  x = tape->Add(x, tape->Constant(PositionEncoding(0, n, cfg.d_model)));
  x = DropoutVar(tape, x, ctx);
  for (int i = 0; i < cfg.blocks; ++i) {
    const std::string p = StrCat("lm.", i);
    Var s = LnVar(tape, ps, p + ".self_ln", x);
    x = tape->Add(DropoutVar(tape, MhaVar(tape, ps, p + ".self", s, s, true, cfg.heads), ctx),
                  x);
    Var f = LnVar(tape, ps, p + ".ffn_ln", x);
    x = tape->Add(DropoutVar(tape, FfnVar(tape, ps, p + ".ffn", f), ctx), x);
  }
  x = LnVar(tape, ps, "lm.final_ln", x);
  return tape->LogSoftmax(ProjVar(tape, ps, "lm.out.w", "lm.out.b", x));
}

AsrLossVars BuildAsrLoss(Tape* tape, const AsrModel& model, const Tensor& features,
                         const std::vector<int>& tokens, double ctc_weight, TrainCtx* ctx) {
  Check(!tokens.empty(), "joint loss: empty transcript");
  Check(ctc_weight >= 0.0 && ctc_weight <= 1.0, "joint loss: ctc_weight outside [0, 1]");
  Var h_enc = BuildEncoder(tape, model, features, ctx);
  Var ctc_logp = BuildCtcLogProbs(tape, model, h_enc);
  Var ctc = tape->CtcLoss(ctc_logp, tokens, model.vocab.blank_id());
  Var dec_logp = BuildDecoderLogProbs(tape, model, h_enc, CrossMode::kFull, nullptr,
                                      WithSos(tokens), ctx);
  Var att = tape->Scale(tape->Sum(tape->Pick(dec_logp, WithEos(tokens))), -1.0);
  Var joint = tape->Add(tape->Scale(ctc, ctc_weight), tape->Scale(att, 1.0 - ctc_weight));
  return {joint, ctc, att};
}

Var BuildLmLoss(Tape* tape, const LmModel& model, const std::vector<int>& tokens,
                TrainCtx* ctx) {
  Var logp = BuildLmLogProbs(tape, model, WithSos(tokens), ctx);
  return tape->Scale(tape->Sum(tape->Pick(logp, WithEos(tokens))), -1.0);
}

EncoderOutput Encode(const AsrModel& model, const Tensor& features) {
  Tape tape;
  Var h = BuildEncoder(&tape, model, features, nullptr);
  return {h.value(), features.rows()};
}

Tensor CtcLogPosteriors(const AsrModel& model, const EncoderOutput& enc) {
  Check(enc.h_enc.rows() >= 1 && enc.h_enc.cols() == model.cfg.d_model,
        "ctc posteriors: malformed encoder output");
  Tensor logits = kernels::Add(kernels::MatMul(enc.h_enc, model.params.Value("ctc.w")),
                               model.params.Value("ctc.b"));
  return kernels::LogSoftmax(logits);
}

Tensor DecoderLogProbsFull(const AsrModel& model, const EncoderOutput* enc, CrossMode mode,
                           const ParamStore* ilm, const std::vector<int>& input_ids) {
  Tape tape;
  Var h;
  if (mode == CrossMode::kFull) {
    Check(enc != nullptr, "decoder: Full mode needs encoder output");
    h = tape.Constant(enc->h_enc);
  }
  return BuildDecoderLogProbs(&tape, model, h, mode, ilm, input_ids, nullptr).value();
}

Tensor DecoderStep(const AsrModel& model, const std::vector<int>& prefix,
                   const EncoderOutput* enc, CrossMode mode, const ParamStore* ilm) {
  Tensor all = DecoderLogProbsFull(model, enc, mode, ilm, WithSos(prefix));
  Tensor row(1, all.cols());
  for (int j = 0; j < all.cols(); ++j) row.at(0, j) = all.at(all.rows() - 1, j);
  return row;
}

Tensor LmLogProbsFull(const LmModel& model, const std::vector<int>& input_ids) {
  Tape tape;
  return BuildLmLogProbs(&tape, model, input_ids, nullptr).value();
}

double AttentionSequenceLogProb(const AsrModel& model, const EncoderOutput* enc, CrossMode mode,
                                const ParamStore* ilm, const std::vector<int>& tokens) {
  Tensor logp = DecoderLogProbsFull(model, enc, mode, ilm, WithSos(tokens));
  const std::vector<int> targets = WithEos(tokens);
  double total = 0.0;
  for (size_t i = 0; i < targets.size(); ++i) {
    total += logp.at(static_cast<int>(i), targets[i]);
  }
  return total;
}

double LmSequenceLogProb(const LmModel& model, const std::vector<int>& tokens) {
  Tensor logp = LmLogProbsFull(model, WithSos(tokens));
  const std::vector<int> targets = WithEos(tokens);
  double total = 0.0;
  for (size_t i = 0; i < targets.size(); ++i) {
    total += logp.at(static_cast<int>(i), targets[i]);
  }
  return total;
}

}  // namespace ilmefuse
