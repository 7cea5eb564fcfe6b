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

#include "ilmefuse/autodiff.h"

#include <cmath>
#include <cstring>
#include <set>
#include <utility>

#include "ilmefuse/ctc.h"
#include "ilmefuse/kernels.h"

namespace ilmefuse {

namespace {

void Accumulate(Tensor* dst, const Tensor& src) {
  Check(dst->SameShape(src), "gradient shape mismatch");
  for (int i = 0; i < src.size(); ++i) (*dst)[i] += src[i];
}

}  // namespace

Param& ParamStore::Create(const std::string& name, int rows, int cols, bool trainable) {
  Check(items_.count(name) == 0, "ParamStore: duplicate param ", name);
  Param p{name, Tensor(rows, cols), trainable};
  return items_.emplace(name, std::move(p)).first->second;
}

Param& ParamStore::Put(Param p) {
  std::string name = p.name;
  Check(!name.empty(), "ParamStore: param without a name");
  return items_.insert_or_assign(name, std::move(p)).first->second;
}

const Param& ParamStore::Get(const std::string& name) const {
  auto it = items_.find(name);
  Check(it != items_.end(), "ParamStore: unknown param ", name);
  return it->second;
}

Param& ParamStore::GetMutable(const std::string& name) {
  auto it = items_.find(name);
  Check(it != items_.end(), "ParamStore: unknown param ", name);
  return it->second;
}

std::vector<std::string> ParamStore::Names() const {
  std::vector<std::string> names;
  names.reserve(items_.size());
  for (const auto& [name, _] : items_) names.push_back(name);
  return names;
}

uint64_t ParamStore::Checksum(const std::function<bool(const std::string&)>& filter) const {
  uint64_t h = 14695981039346656037ull;
  for (const auto& [name, p] : items_) {
    if (filter && !filter(name)) continue;
    h = Fnv1a(name.data(), name.size(), h);
    const int shape[2] = {p.value.rows(), p.value.cols()};
    h = Fnv1a(shape, sizeof(shape), h);
    h = Fnv1a(p.value.data(), sizeof(double) * p.value.size(), h);
  }
  return h;
}

const char* OpName(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kParam: return "param";
    case Op::kConst: return "const";
    case Op::kMatMul: return "matmul";
    case Op::kTranspose: return "transpose";
    case Op::kAdd: return "add";
    case Op::kMul: return "mul";
    case Op::kScale: return "scale";
    case Op::kLayerNorm: return "layer_norm";
    case Op::kSoftmax: return "softmax";
    case Op::kLogSoftmax: return "log_softmax";
    case Op::kRelu: return "relu";
    case Op::kGelu: return "gelu";
    case Op::kEmbed: return "embed";
    case Op::kPick: return "pick";
    case Op::kConcat: return "concat";
    case Op::kSlice: return "slice";
    case Op::kSum: return "sum";
    case Op::kCtcLoss: return "ctc_loss";
  }
  return "?";
}

const Tensor& Var::value() const {
  Check(tape_ != nullptr && id_ >= 0, "Var: default-constructed handle");
  return tape_->value(id_);
}

Var Tape::Push(Node node) {
  const Tensor* a = node.a >= 0 ? &nodes_[node.a].value : nullptr;
  const Tensor* b = node.b >= 0 ? &nodes_[node.b].value : nullptr;
  const Tensor* c = node.c >= 0 ? &nodes_[node.c].value : nullptr;
  if (node.op != Op::kInput && node.op != Op::kParam && node.op != Op::kConst) {
    node.value = Forward(node, a, b, c);
  }
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::Input(const std::string& name, Tensor value) {
  Check(!name.empty(), "Tape: input without a name");
  for (const Node& n : nodes_) {
    Check(!(n.op == Op::kInput && n.name == name), "Tape: duplicate input ", name);
  }
  Node node;
  node.op = Op::kInput;
  node.name = name;
  node.value = std::move(value);
  return Push(std::move(node));
}

Var Tape::Param(const ParamStore& store, const std::string& name) {
  Node node;
  node.op = Op::kParam;
  node.name = name;
  node.value = store.Value(name);
  return Push(std::move(node));
}

Var Tape::Constant(Tensor value) {
  Node node;
  node.op = Op::kConst;
  node.value = std::move(value);
  return Push(std::move(node));
}

namespace {
void CheckSameTape(const Tape* tape, std::initializer_list<Var> vars) {
  for (const Var& v : vars) {
    Check(v.tape() == tape, "Tape: operand built on a different tape");
  }
}
}  // namespace

Var Tape::MatMul(Var a, Var b) {
  CheckSameTape(this, {a, b});
  Node node;
  node.op = Op::kMatMul;
  node.a = a.id();
  node.b = b.id();
  return Push(std::move(node));
}

Var Tape::Transpose(Var a) {
  CheckSameTape(this, {a});
  Node node;
  node.op = Op::kTranspose;
  node.a = a.id();
  return Push(std::move(node));
}

Var Tape::Add(Var a, Var b) {
  CheckSameTape(this, {a, b});
  Node node;
  node.op = Op::kAdd;
  node.a = a.id();
  node.b = b.id();
  return Push(std::move(node));
}

Var Tape::Mul(Var a, Var b) {
  CheckSameTape(this, {a, b});
  Node node;
  node.op = Op::kMul;
  node.a = a.id();
  node.b = b.id();
  return Push(std::move(node));
}

Var Tape::Scale(Var a, double s) {
  CheckSameTape(this, {a});
  Node node;
  node.op = Op::kScale;
  node.a = a.id();
  node.scalar = s;
  return Push(std::move(node));
}

Var Tape::LayerNorm(Var x, Var gain, Var bias) {
  CheckSameTape(this, {x, gain, bias});
  Node node;
  node.op = Op::kLayerNorm;
  node.a = x.id();
  node.b = gain.id();
  node.c = bias.id();
  return Push(std::move(node));
}

Var Tape::Softmax(Var x) {
  CheckSameTape(this, {x});
  Node node;
  node.op = Op::kSoftmax;
  node.a = x.id();
  return Push(std::move(node));
}

Var Tape::LogSoftmax(Var x) {
  CheckSameTape(this, {x});
  Node node;
  node.op = Op::kLogSoftmax;
  node.a = x.id();
  return Push(std::move(node));
}

Var Tape::Relu(Var x) {
  CheckSameTape(this, {x});
  Node node;
  node.op = Op::kRelu;
  node.a = x.id();
  return Push(std::move(node));
}

Var Tape::Gelu(Var x) {
  CheckSameTape(this, {x});
  Node node;
  node.op = Op::kGelu;
  node.a = x.id();
  return Push(std::move(node));
}

Var Tape::Embed(Var table, std::vector<int> ids) {
  CheckSameTape(this, {table});
  Node node;
  node.op = Op::kEmbed;
  node.a = table.id();
  node.ids = std::move(ids);
  return Push(std::move(node));
}

Var Tape::Pick(Var x, std::vector<int> ids) {
  CheckSameTape(this, {x});
  Node node;
  node.op = Op::kPick;
  node.a = x.id();
  node.ids = std::move(ids);
  return Push(std::move(node));
}

Var Tape::Concat(Var a, Var b, int axis) {
  CheckSameTape(this, {a, b});
  Check(axis == 0 || axis == 1, "Concat: axis must be 0 or 1, got ", axis);
  Node node;
  node.op = Op::kConcat;
  node.a = a.id();
  node.b = b.id();
  node.axis = axis;
  return Push(std::move(node));
}

Var Tape::Slice(Var x, int axis, int start, int len) {
  CheckSameTape(this, {x});
  Check(axis == 0 || axis == 1, "Slice: axis must be 0 or 1, got ", axis);
  Node node;
  node.op = Op::kSlice;
  node.a = x.id();
  node.axis = axis;
  node.start = start;
  node.len = len;
  return Push(std::move(node));
}

Var Tape::Sum(Var x) {
  CheckSameTape(this, {x});
  Node node;
  node.op = Op::kSum;
  node.a = x.id();
  return Push(std::move(node));
}

Var Tape::CtcLoss(Var log_posteriors, std::vector<int> labels, int blank) {
  CheckSameTape(this, {log_posteriors});
  Node node;
  node.op = Op::kCtcLoss;
  node.a = log_posteriors.id();
  node.ids = std::move(labels);
  node.blank = blank;
  return Push(std::move(node));
}

void Tape::MarkOutput(const std::string& name, Var v) {
  CheckSameTape(this, {v});
  for (const auto& [existing, _] : outputs_) {
    Check(existing != name, "Tape: duplicate output ", name);
  }
  outputs_.emplace_back(name, v.id());
}

Tensor Tape::Forward(const Node& node, const Tensor* a, const Tensor* b, const Tensor* c) {
  switch (node.op) {
    case Op::kInput:
    case Op::kParam:
    case Op::kConst:
      Fail("Forward: leaf nodes carry their own value");
    case Op::kMatMul:
      return kernels::MatMul(*a, *b);
    case Op::kTranspose:
      return kernels::Transpose(*a);
    case Op::kAdd:
      return kernels::Add(*a, *b);
    case Op::kMul:
      return kernels::Mul(*a, *b);
    case Op::kScale:
      return kernels::Scale(*a, node.scalar);
    case Op::kLayerNorm:
      return kernels::LayerNorm(*a, *b, *c);
    case Op::kSoftmax:
      return kernels::Softmax(*a);
    case Op::kLogSoftmax:
      return kernels::LogSoftmax(*a);
    case Op::kRelu:
      return kernels::Relu(*a);
    case Op::kGelu:
      return kernels::Gelu(*a);
    case Op::kEmbed: {
      Tensor out(static_cast<int>(node.ids.size()), a->cols());
      for (size_t i = 0; i < node.ids.size(); ++i) {
        const int id = node.ids[i];
        Check(id >= 0 && id < a->rows(), "Embed: row ", id, " out of range 0..", a->rows() - 1);
        for (int j = 0; j < a->cols(); ++j) out.at(static_cast<int>(i), j) = a->at(id, j);
      }
      return out;
    }
    case Op::kPick: {
      Check(static_cast<int>(node.ids.size()) == a->rows(),
            "Pick: need one column index per row");
      Tensor out(a->rows(), 1);
      for (int i = 0; i < a->rows(); ++i) {
        const int id = node.ids[i];
        Check(id >= 0 && id < a->cols(), "Pick: column ", id, " out of range 0..", a->cols() - 1);
        out.at(i, 0) = a->at(i, id);
      }
      return out;
    }
    case Op::kConcat: {
      if (node.axis == 0) {
        Check(a->cols() == b->cols(), "Concat axis 0: column extents differ");
        Tensor out(a->rows() + b->rows(), a->cols());
        for (int i = 0; i < a->rows(); ++i)
          for (int j = 0; j < a->cols(); ++j) out.at(i, j) = a->at(i, j);
        for (int i = 0; i < b->rows(); ++i)
          for (int j = 0; j < b->cols(); ++j) out.at(a->rows() + i, j) = b->at(i, j);
        return out;
      }
      Check(a->rows() == b->rows(), "Concat axis 1: row extents differ");
      Tensor out(a->rows(), a->cols() + b->cols());
      for (int i = 0; i < a->rows(); ++i) {
        for (int j = 0; j < a->cols(); ++j) out.at(i, j) = a->at(i, j);
        for (int j = 0; j < b->cols(); ++j) out.at(i, a->cols() + j) = b->at(i, j);
      }
      return out;
    }
    case Op::kSlice: {
      const int extent = node.axis == 0 ? a->rows() : a->cols();
      Check(node.start >= 0 && node.len >= 0 && node.start + node.len <= extent,
            "Slice: range [", node.start, ", ", node.start + node.len, ") outside extent ",
            extent);
      if (node.axis == 0) {
        Tensor out(node.len, a->cols());
        for (int i = 0; i < node.len; ++i)
          for (int j = 0; j < a->cols(); ++j) out.at(i, j) = a->at(node.start + i, j);
        return out;
      }
      Tensor out(a->rows(), node.len);
      for (int i = 0; i < a->rows(); ++i)
        for (int j = 0; j < node.len; ++j) out.at(i, j) = a->at(i, node.start + j);
      return out;
    }
    case Op::kSum: {
      double acc = 0.0;
      for (int i = 0; i < a->size(); ++i) acc += (*a)[i];
      Tensor out(1, 1);
      out.at(0, 0) = acc;
      return out;
    }
    case Op::kCtcLoss: {
      const double nll = CtcNll(*a, node.ids, node.blank);
      Check(std::isfinite(nll),
            "CtcLoss: no feasible alignment (", a->rows(), " frames for ", node.ids.size(),
            " labels)");
      Tensor out(1, 1);
      out.at(0, 0) = nll;
      return out;
    }
  }
  Fail("Forward: unknown op");
}

void Tape::Backward(const Node& node, const Tensor& out, const Tensor& grad_out,
                    const Tensor* a, const Tensor* b, const Tensor* c,
                    Tensor* ga, Tensor* gb, Tensor* gc) {
  (void)c;  // the bias operand of kLayerNorm never enters a gradient formula
  switch (node.op) {
    case Op::kInput:
    case Op::kParam:
    case Op::kConst:
      return;
    case Op::kMatMul:
      if (ga != nullptr) Accumulate(ga, kernels::MatMulNT(grad_out, *b));
      if (gb != nullptr) Accumulate(gb, kernels::MatMul(kernels::Transpose(*a), grad_out));
      return;
    case Op::kTranspose:
      if (ga != nullptr) Accumulate(ga, kernels::Transpose(grad_out));
      return;
    case Op::kAdd:
      if (ga != nullptr) Accumulate(ga, grad_out);
      if (gb != nullptr) {
        if (b->SameShape(grad_out)) {
          Accumulate(gb, grad_out);
        } else {
          // rhs was broadcast over rows; fold the rows back.
          for (int i = 0; i < grad_out.rows(); ++i)
            for (int j = 0; j < grad_out.cols(); ++j) gb->at(0, j) += grad_out.at(i, j);
        }
      }
      return;
    case Op::kMul:
      if (ga != nullptr) Accumulate(ga, kernels::Mul(grad_out, *b));
      if (gb != nullptr) Accumulate(gb, kernels::Mul(grad_out, *a));
      return;
    case Op::kScale:
      if (ga != nullptr) Accumulate(ga, kernels::Scale(grad_out, node.scalar));
      return;
    case Op::kLayerNorm: {
      const int rows = a->rows(), cols = a->cols();
      for (int r = 0; r < rows; ++r) {
        const double* x = a->row(r);
        const double* dy = grad_out.row(r);
        double mu = 0.0;
        for (int j = 0; j < cols; ++j) mu += x[j];
        mu /= cols;
        double var = 0.0;
        for (int j = 0; j < cols; ++j) var += (x[j] - mu) * (x[j] - mu);
        var /= cols;
        const double inv = 1.0 / std::sqrt(var + kernels::kLayerNormEps);
        double m1 = 0.0, m2 = 0.0;
        for (int j = 0; j < cols; ++j) {
          const double xhat = (x[j] - mu) * inv;
          const double dxhat = dy[j] * b->at(0, j);
          m1 += dxhat;
          m2 += dxhat * xhat;
          if (gb != nullptr) gb->at(0, j) += dy[j] * xhat;
          if (gc != nullptr) gc->at(0, j) += dy[j];
        }
        m1 /= cols;
        m2 /= cols;
        if (ga != nullptr) {
          for (int j = 0; j < cols; ++j) {
            const double xhat = (x[j] - mu) * inv;
            const double dxhat = dy[j] * b->at(0, j);
            ga->at(r, j) += inv * (dxhat - m1 - xhat * m2);
          }
        }
      }
      return;
    }
    case Op::kSoftmax: {
      if (ga == nullptr) return;
      for (int r = 0; r < out.rows(); ++r) {
        double dot = 0.0;
        for (int j = 0; j < out.cols(); ++j) dot += grad_out.at(r, j) * out.at(r, j);
        for (int j = 0; j < out.cols(); ++j)
          ga->at(r, j) += out.at(r, j) * (grad_out.at(r, j) - dot);
      }
      return;
    }
    case Op::kLogSoftmax: {
      if (ga == nullptr) return;
      for (int r = 0; r < out.rows(); ++r) {
        double total = 0.0;
        for (int j = 0; j < out.cols(); ++j) total += grad_out.at(r, j);
        for (int j = 0; j < out.cols(); ++j)
          ga->at(r, j) += grad_out.at(r, j) - std::exp(out.at(r, j)) * total;
      }
      return;
    }
    case Op::kRelu:
      if (ga != nullptr) {
        for (int i = 0; i < a->size(); ++i) {
          if ((*a)[i] > 0.0) (*ga)[i] += grad_out[i];
        }
      }
      return;
    case Op::kGelu:
      if (ga != nullptr) {
        for (int i = 0; i < a->size(); ++i)
          (*ga)[i] += grad_out[i] * kernels::GeluGradScalar((*a)[i]);
      }
      return;
    case Op::kEmbed:
      if (ga != nullptr) {
        for (size_t i = 0; i < node.ids.size(); ++i)
          for (int j = 0; j < ga->cols(); ++j)
            ga->at(node.ids[i], j) += grad_out.at(static_cast<int>(i), j);
      }
      return;
    case Op::kPick:
      if (ga != nullptr) {
        for (size_t i = 0; i < node.ids.size(); ++i)
          ga->at(static_cast<int>(i), node.ids[i]) += grad_out.at(static_cast<int>(i), 0);
      }
      return;
    case Op::kConcat: {
      if (node.axis == 0) {
        if (ga != nullptr)
          for (int i = 0; i < a->rows(); ++i)
            for (int j = 0; j < a->cols(); ++j) ga->at(i, j) += grad_out.at(i, j);
        if (gb != nullptr)
          for (int i = 0; i < b->rows(); ++i)
            for (int j = 0; j < b->cols(); ++j) gb->at(i, j) += grad_out.at(a->rows() + i, j);
      } else {
        if (ga != nullptr)
          for (int i = 0; i < a->rows(); ++i)
            for (int j = 0; j < a->cols(); ++j) ga->at(i, j) += grad_out.at(i, j);
        if (gb != nullptr)
          for (int i = 0; i < b->rows(); ++i)
            for (int j = 0; j < b->cols(); ++j) gb->at(i, j) += grad_out.at(i, a->cols() + j);
      }
      return;
    }
    case Op::kSlice:
      if (ga != nullptr) {
        if (node.axis == 0) {
          for (int i = 0; i < node.len; ++i)
            for (int j = 0; j < ga->cols(); ++j) ga->at(node.start + i, j) += grad_out.at(i, j);
        } else {
          for (int i = 0; i < ga->rows(); ++i)
            for (int j = 0; j < node.len; ++j) ga->at(i, node.start + j) += grad_out.at(i, j);
        }
      }
      return;
    case Op::kSum:
      if (ga != nullptr) {
        for (int i = 0; i < ga->size(); ++i) (*ga)[i] += grad_out.at(0, 0);
      }
      return;
    case Op::kCtcLoss:
      if (ga != nullptr) {
        Tensor dlogp;
        CtcNll(*a, node.ids, node.blank, &dlogp);
        Accumulate(ga, kernels::Scale(dlogp, grad_out.at(0, 0)));
      }
      return;
  }
  Fail("Backward: unknown op");
}

std::map<std::string, Tensor> Tape::Evaluate(const std::map<std::string, Tensor>& inputs) const {
  std::set<std::string> consumed;
  std::vector<Tensor> vals(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    const Node& node = nodes_[i];
    switch (node.op) {
      case Op::kInput: {
        auto it = inputs.find(node.name);
        Check(it != inputs.end(), "Evaluate: missing input ", node.name);
        Check(it->second.SameShape(node.value), "Evaluate: input ", node.name,
              " has shape ", it->second.rows(), "x", it->second.cols(), ", recorded ",
              node.value.rows(), "x", node.value.cols());
        vals[i] = it->second;
        consumed.insert(node.name);
        break;
      }
      case Op::kParam:
      case Op::kConst:
        vals[i] = node.value;
        break;
      default: {
        const Tensor* a = node.a >= 0 ? &vals[node.a] : nullptr;
        const Tensor* b = node.b >= 0 ? &vals[node.b] : nullptr;
        const Tensor* c = node.c >= 0 ? &vals[node.c] : nullptr;
        vals[i] = Forward(node, a, b, c);
      }
    }
  }
  for (const auto& [name, _] : inputs) {
    Check(consumed.count(name) > 0, "Evaluate: input ", name, " is not on the tape");
  }
  std::map<std::string, Tensor> result;
  for (const auto& [name, id] : outputs_) result.emplace(name, vals[id]);
  return result;
}

std::map<std::string, Tensor> Tape::Gradients(Var loss,
                                              const std::vector<std::string>& params) const {
  Check(loss.tape() == this, "Gradients: loss lives on a different tape");
  const Tensor& loss_value = nodes_[loss.id()].value;
  Check(loss_value.rows() == 1 && loss_value.cols() == 1,
        "Gradients: loss must be 1x1, got ", loss_value.rows(), "x", loss_value.cols());

  std::vector<Tensor> grads(nodes_.size());
  std::vector<char> has(nodes_.size(), 0);
  grads[loss.id()] = Tensor(1, 1, {1.0});
  has[loss.id()] = 1;

  auto ensure = [&](int id) -> Tensor* {
    if (id < 0) return nullptr;
    if (!has[id]) {
      grads[id] = Tensor(nodes_[id].value.rows(), nodes_[id].value.cols());
      has[id] = 1;
    }
    return &grads[id];
  };

  for (int i = loss.id(); i >= 0; --i) {
    if (!has[i]) continue;
    const Node& node = nodes_[i];
    if (node.op == Op::kInput || node.op == Op::kParam || node.op == Op::kConst) continue;
    const Tensor* a = node.a >= 0 ? &nodes_[node.a].value : nullptr;
    const Tensor* b = node.b >= 0 ? &nodes_[node.b].value : nullptr;
    const Tensor* c = node.c >= 0 ? &nodes_[node.c].value : nullptr;
    Backward(node, node.value, grads[i], a, b, c, ensure(node.a), ensure(node.b),
             ensure(node.c));
  }

  std::map<std::string, Tensor> result;
  for (const std::string& name : params) {
    Tensor* sum = nullptr;
    bool found = false;
    for (size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].op != Op::kParam || nodes_[i].name != name) continue;
      if (!found) {
        found = true;
        auto [it, _] = result.emplace(
            name, has[i] ? grads[i] : Tensor(nodes_[i].value.rows(), nodes_[i].value.cols()));
        sum = &it->second;
      } else if (has[i]) {
        Accumulate(sum, grads[i]);
      }
    }
    Check(found, "Gradients: param ", name, " is not on the tape");
  }
  return result;
}

double FiniteDifferenceCheck(
    const std::function<double(const ParamStore&, std::map<std::string, Tensor>*)>& fn,
    ParamStore* store, const std::vector<std::string>& params, double epsilon) {
  std::map<std::string, Tensor> grads;
  const double base = fn(*store, &grads);
  Check(std::isfinite(base), "FiniteDifferenceCheck: loss is not finite at the base point");

  double worst = 0.0;
  for (const std::string& name : params) {
    auto it = grads.find(name);
    Check(it != grads.end(), "FiniteDifferenceCheck: fn returned no gradient for ", name);
    Tensor& value = store->GetMutable(name).value;
    Check(it->second.SameShape(value), "FiniteDifferenceCheck: gradient shape mismatch for ",
          name);
    for (int i = 0; i < value.size(); ++i) {
      const double saved = value[i];
      value[i] = saved + epsilon;
      const double up = fn(*store, nullptr);
      value[i] = saved - epsilon;
      const double down = fn(*store, nullptr);
      value[i] = saved;
      Check(std::isfinite(up) && std::isfinite(down),
            "FiniteDifferenceCheck: loss is not finite near ", name, "[", i, "]");
      const double numeric = (up - down) / (2.0 * epsilon);
      const double analytic = it->second[i];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
  }
  return worst;
}

}  // namespace ilmefuse
