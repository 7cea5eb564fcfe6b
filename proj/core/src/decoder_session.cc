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

#include "ilmefuse/decoder_session.h"

#include <cmath>

#include "ilmefuse/kernels.h"

namespace ilmefuse {

namespace {

using kernels::Add;
using kernels::MatMul;
using kernels::MatMulNT;
using kernels::Relu;

Tensor AppendRow(const Tensor& m, const Tensor& row) {
  Tensor out(m.rows() + 1, row.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out.at(i, j) = m.at(i, j);
  }
  for (int j = 0; j < row.cols(); ++j) out.at(m.rows(), j) = row.at(0, j);
  return out;
}

Tensor SliceCols(const Tensor& m, int start, int len) {
  Tensor out(m.rows(), len);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < len; ++j) out.at(i, j) = m.at(i, start + j);
  }
  return out;
}

Tensor LnRow(const ParamStore& ps, const std::string& prefix, const Tensor& x) {
  return kernels::LayerNorm(x, ps.Value(prefix + ".g"), ps.Value(prefix + ".b"));
}

Tensor ProjRow(const ParamStore& ps, const std::string& w, const std::string& b,
               const Tensor& x) {
  return Add(MatMul(x, ps.Value(w)), ps.Value(b));
}

Tensor FfnRow(const ParamStore& ps, const std::string& prefix, const Tensor& x) {
  return ProjRow(ps, prefix + ".w2", prefix + ".b2",
                 Relu(ProjRow(ps, prefix + ".w1", prefix + ".b1", x)));
}

// One query row against projected keys/values; accumulation order matches
// MatMul(qh, Transpose(kh)) / MatMul(softmax, vh) on the full prefix.
Tensor AttendRow(const Tensor& q, const Tensor& keys, const Tensor& values, int heads) {
  const int d = q.cols();
  const int dk = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  Tensor ctx(1, d);
  for (int h = 0; h < heads; ++h) {
    const Tensor qh = SliceCols(q, h * dk, dk);
    const Tensor kh = SliceCols(keys, h * dk, dk);
    const Tensor vh = SliceCols(values, h * dk, dk);
    const Tensor a = kernels::Softmax(kernels::Scale(MatMulNT(qh, kh), scale));
    const Tensor ctxh = MatMul(a, vh);
    for (int j = 0; j < dk; ++j) ctx.at(0, h * dk + j) = ctxh.at(0, j);
  }
  return ctx;
}

Tensor EmbedRow(const ParamStore& ps, const std::string& table, int token, int pos,
                int d_model) {
  const Tensor& t = ps.Value(table);
  Check(token >= 0 && token < t.rows(), "session: token id ", token, " out of range");
  Tensor row(1, d_model);
  for (int j = 0; j < d_model; ++j) row.at(0, j) = t.at(token, j);
  return Add(kernels::Scale(row, std::sqrt(static_cast<double>(d_model))),
             PositionEncoding(pos, 1, d_model));
}

}  // namespace

DecoderSession::DecoderSession(const AsrModel& model, const EncoderOutput* enc, CrossMode mode,
                               const ParamStore* ilm)
    : model_(&model), mode_(mode), ilm_(ilm) {
  const AsrConfig& cfg = model.cfg;
  if (mode == CrossMode::kFull) {
    Check(enc != nullptr, "session: Full mode needs encoder output");
    Check(enc->h_enc.rows() >= 1 && enc->h_enc.cols() == cfg.d_model,
          "session: malformed encoder output");
    for (int b = 0; b < cfg.dec_blocks; ++b) {
      const std::string p = StrCat("dec.", b, ".cross");
      cross_k_.push_back(ProjRow(model.params, p + ".wk", p + ".bk", enc->h_enc));
      cross_v_.push_back(ProjRow(model.params, p + ".wv", p + ".bv", enc->h_enc));
    }
  } else {
    Check(ilm != nullptr, "session: ", CrossModeName(mode), " mode needs ILM params");
    Check(mode != CrossMode::kOtcl || ilm->Has("ilm.bias"),
          "session: ILM params carry no OTCL bias");
    Check(mode != CrossMode::kLscl || ilm->Has("ilm.ffn.w1"),
          "session: ILM params carry no LSCL weights");
  }
  cache_.resize(cfg.dec_blocks);
  for (auto& c : cache_) {
    c.self_k = Tensor(0, cfg.d_model);
    c.self_v = Tensor(0, cfg.d_model);
  }
  Step(Vocab::kSosId);
}

void DecoderSession::Advance(int token) { Step(token); }

void DecoderSession::Step(int token) {
  const AsrConfig& cfg = model_->cfg;
  const ParamStore& ps = model_->params;
  Tensor x = EmbedRow(ps, "embed.table", token, pos_, cfg.d_model);
  last_cross_out_.clear();
  for (int b = 0; b < cfg.dec_blocks; ++b) {
    const std::string p = StrCat("dec.", b);
    const Tensor cr = LnRow(ps, p + ".cross_ln", x);
    Tensor co;
    switch (mode_) {
      case CrossMode::kFull: {
        const Tensor q = ProjRow(ps, p + ".cross.wq", p + ".cross.bq", cr);
        co = ProjRow(ps, p + ".cross.wo", p + ".cross.bo",
                     AttendRow(q, cross_k_[b], cross_v_[b], cfg.heads));
        break;
      }
      case CrossMode::kOtcl:
        co = Add(Tensor(1, cfg.d_model), ilm_->Value("ilm.bias"));
        break;
      case CrossMode::kLscl:
        co = Add(MatMul(Relu(Add(MatMul(cr, ilm_->Value("ilm.ffn.w1")),
                                 ilm_->Value("ilm.ffn.b1"))),
                        ilm_->Value("ilm.ffn.w2")),
                 ilm_->Value("ilm.ffn.b2"));
        break;
    }
    x = Add(co, x);
    last_cross_out_.push_back(x);
    const Tensor s = LnRow(ps, p + ".self_ln", x);
    cache_[b].self_k = AppendRow(cache_[b].self_k, ProjRow(ps, p + ".self.wk", p + ".self.bk", s));
    cache_[b].self_v = AppendRow(cache_[b].self_v, ProjRow(ps, p + ".self.wv", p + ".self.bv", s));
    const Tensor q = ProjRow(ps, p + ".self.wq", p + ".self.bq", s);
    x = Add(ProjRow(ps, p + ".self.wo", p + ".self.bo",
                    AttendRow(q, cache_[b].self_k, cache_[b].self_v, cfg.heads)),
            x);
    const Tensor f = LnRow(ps, p + ".ffn_ln", x);
    x = Add(FfnRow(ps, p + ".ffn", f), x);
  }
  x = LnRow(ps, "dec.final_ln", x);
  next_log_probs_ = kernels::LogSoftmax(ProjRow(ps, "dec.out.w", "dec.out.b", x));
  ++pos_;
}

LmSession::LmSession(const LmModel& model) : model_(&model) {
  cache_.resize(model.cfg.blocks);
  for (auto& c : cache_) {
    c.self_k = Tensor(0, model.cfg.d_model);
    c.self_v = Tensor(0, model.cfg.d_model);
  }
  Step(Vocab::kSosId);
}

void LmSession::Advance(int token) { Step(token); }

void LmSession::Step(int token) {
  const LmConfig& cfg = model_->cfg;
  const ParamStore& ps = model_->params;
  Tensor x = EmbedRow(ps, "lm.embed.table", token, pos_, cfg.d_model);
  for (int b = 0; b < cfg.blocks; ++b) {
    const std::string p = StrCat("lm.", b);
    const Tensor s = LnRow(ps, p + ".self_ln", x);
    cache_[b].self_k = AppendRow(cache_[b].self_k, ProjRow(ps, p + ".self.wk", p + ".self.bk", s));
    cache_[b].self_v = AppendRow(cache_[b].self_v, ProjRow(ps, p + ".self.wv", p + ".self.bv", s));
    const Tensor q = ProjRow(ps, p + ".self.wq", p + ".self.bq", s);
    x = Add(ProjRow(ps, p + ".self.wo", p + ".self.bo",
                    AttendRow(q, cache_[b].self_k, cache_[b].self_v, cfg.heads)),
            x);
    const Tensor f = LnRow(ps, p + ".ffn_ln", x);
    x = Add(FfnRow(ps, p + ".ffn", f), x);
  }
  x = LnRow(ps, "lm.final_ln", x);
  next_log_probs_ = kernels::LogSoftmax(ProjRow(ps, "lm.out.w", "lm.out.b", x));
  ++pos_;
}

}  // namespace ilmefuse
