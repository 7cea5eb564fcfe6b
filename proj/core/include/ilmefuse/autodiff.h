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

#ifndef ILMEFUSE_AUTODIFF_H_
#define ILMEFUSE_AUTODIFF_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ilmefuse/common.h"
#include "ilmefuse/tensor.h"

namespace ilmefuse {

// A named trainable array.
struct Param {
  std::string name;
  Tensor value;
  bool trainable = true;
};

// Ordered container of model parameters. std::map keeps iteration order
// deterministic, which checksums, serialization and optimizer updates rely
// on.
class ParamStore {
 public:
  Param& Create(const std::string& name, int rows, int cols, bool trainable = true);
  Param& Put(Param p);

  bool Has(const std::string& name) const { return items_.count(name) > 0; }
  const Param& Get(const std::string& name) const;
  Param& GetMutable(const std::string& name);
  const Tensor& Value(const std::string& name) const { return Get(name).value; }

  std::vector<std::string> Names() const;
  size_t size() const { return items_.size(); }

  // FNV-1a over name, shape and raw value bytes of every param accepted by
  // the filter. Pass nullptr to cover the whole store.
  uint64_t Checksum(const std::function<bool(const std::string&)>& filter = nullptr) const;

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  auto begin() { return items_.begin(); }
  auto end() { return items_.end(); }

 private:
  std::map<std::string, Param> items_;
};

enum class Op {
  kInput,
  kParam,
  kConst,
  kMatMul,
  kTranspose,
  kAdd,       // same shape, or rhs is 1 x C broadcast over rows
  kMul,       // elementwise
  kScale,     // multiply by fixed scalar
  kLayerNorm, // row-wise, inputs (x, gain, bias)
  kSoftmax,   // row-wise
  kLogSoftmax,
  kRelu,
  kGelu,
  kEmbed,     // gather rows of input 0 by ids
  kPick,      // out[i, 0] = x[i, ids[i]]
  kConcat,    // along axis (0 = rows, 1 = cols)
  kSlice,
  kSum,       // all elements -> 1 x 1
  kCtcLoss,   // forward-algorithm negative log-likelihood -> 1 x 1
};

const char* OpName(Op op);

class Tape;

// Handle to a tape node. Values are computed eagerly while the tape is
// built, so value() is always available.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  int id() const { return id_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  int id_ = -1;
};

// Reverse-mode tape over a small fixed primitive set. Operations record
// themselves and evaluate eagerly; Gradients() runs the reverse sweep,
// Evaluate() replays the whole record against fresh input values.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves.
  Var Input(const std::string& name, Tensor value);
  Var Param(const ParamStore& store, const std::string& name);
  Var Constant(Tensor value);

  // Primitives.
  Var MatMul(Var a, Var b);
  Var Transpose(Var a);
  Var Add(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double s);
  Var LayerNorm(Var x, Var gain, Var bias);
  Var Softmax(Var x);
  Var LogSoftmax(Var x);
  Var Relu(Var x);
  Var Gelu(Var x);
  Var Embed(Var table, std::vector<int> ids);
  Var Pick(Var x, std::vector<int> ids);
  Var Concat(Var a, Var b, int axis);
  Var Slice(Var x, int axis, int start, int len);
  Var Sum(Var x);
  Var CtcLoss(Var log_posteriors, std::vector<int> labels, int blank);

  void MarkOutput(const std::string& name, Var v);

  // Replays the recorded operations with the given input leaf values and
  // returns all marked outputs. Deterministic: identical inputs produce
  // bit-identical outputs.
  std::map<std::string, Tensor> Evaluate(const std::map<std::string, Tensor>& inputs) const;

  // Reverse sweep from a scalar loss. Returns one gradient per requested
  // param name; requesting a param that never appeared on the tape is an
  // error.
  std::map<std::string, Tensor> Gradients(Var loss, const std::vector<std::string>& params) const;

  const Tensor& value(int id) const { return nodes_[id].value; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  friend class Var;

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    int c = -1;
    Tensor value;
    double scalar = 0.0;
    int axis = 0;
    int start = 0;
    int len = 0;
    int blank = -1;
    std::vector<int> ids;
    std::string name;  // kInput / kParam leaf name
  };

  Var Push(Node node);
  static Tensor Forward(const Node& node, const Tensor* a, const Tensor* b, const Tensor* c);
  static void Backward(const Node& node, const Tensor& out, const Tensor& grad_out,
                       const Tensor* a, const Tensor* b, const Tensor* c,
                       Tensor* ga, Tensor* gb, Tensor* gc);

  std::vector<Node> nodes_;
  std::vector<std::pair<std::string, int>> outputs_;
};

// Central-difference check of analytic gradients. `fn` evaluates the loss
// and its gradients for the current store contents; only the loss is used
// at perturbed points. Returns the maximum relative error over all
// coordinates of the requested params, with relative error defined as
// |a - b| / max(|a|, |b|, 1e-8).
double FiniteDifferenceCheck(
    const std::function<double(const ParamStore&, std::map<std::string, Tensor>*)>& fn,
    ParamStore* store, const std::vector<std::string>& params, double epsilon);

}  // namespace ilmefuse

#endif  // ILMEFUSE_AUTODIFF_H_
