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
#include <vector>

#include "doctest.h"
#include "ilmefuse/autodiff.h"
#include "ilmefuse/common.h"
#include "ilmefuse/rng.h"
#include "oracles.h"

namespace ilmefuse {
namespace {

Tensor RandomTensor(int rows, int cols, Rng* rng, double scale = 1.0) {
  Tensor t(rows, cols);
  for (int i = 0; i < t.size(); ++i) t[i] = scale * (2.0 * rng->Uniform() - 1.0);
  return t;
}

TEST_CASE("evaluate: identity tape returns its input") {
  Tape tape;
  Var x = tape.Input("x", Tensor::FromRows({{1.0, 2.0, 3.0}}));
  tape.MarkOutput("y", x);
  const auto out = tape.Evaluate({{"x", Tensor::FromRows({{1.0, 2.0, 3.0}})}});
  const Tensor& y = out.at("y");
  REQUIRE(y.rows() == 1);
  REQUIRE(y.cols() == 3);
  CHECK(y.at(0, 0) == 1.0);
  CHECK(y.at(0, 1) == 2.0);
  CHECK(y.at(0, 2) == 3.0);
}

TEST_CASE("evaluate: softmax of [0, 0] is [0.5, 0.5]") {
  Tape tape;
  Var y = tape.Softmax(tape.Input("x", Tensor(1, 2)));
  CHECK(y.value().at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(y.value().at(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("evaluate: log-softmax matches an independent implementation") {
  Rng rng(11);
  const Tensor z = RandomTensor(1, 5, &rng, 3.0);
  Tape tape;
  Var y = tape.LogSoftmax(tape.Input("z", z));

  // Straightforward reference: log(exp(z_i) / sum exp(z_j)).
  double denom = 0.0;
  for (int j = 0; j < 5; ++j) denom += std::exp(z.at(0, j));
  for (int j = 0; j < 5; ++j) {
    const double want = std::log(std::exp(z.at(0, j)) / denom);
    CHECK(std::fabs(y.value().at(0, j) - want) < 1e-12);
  }
}

TEST_CASE("evaluate: deterministic bit-identical replay") {
  Rng rng(12);
  const Tensor x = RandomTensor(4, 4, &rng);
  ParamStore store;
  store.Create("w", 4, 4);
  for (int i = 0; i < 16; ++i) store.GetMutable("w").value[i] = rng.Uniform();

  Tape tape;
  Var v = tape.Gelu(tape.MatMul(tape.Input("x", x), tape.Param(store, "w")));
  tape.MarkOutput("y", tape.Softmax(v));

  const auto a = tape.Evaluate({{"x", x}});
  const auto b = tape.Evaluate({{"x", x}});
  const Tensor& ya = a.at("y");
  const Tensor& yb = b.at("y");
  for (int i = 0; i < ya.size(); ++i) CHECK(ya[i] == yb[i]);
}

TEST_CASE("evaluate: replay recomputes from fresh inputs") {
  Tape tape;
  Var x = tape.Input("x", Tensor::FromRows({{1.0, 2.0}}));
  tape.MarkOutput("y", tape.Scale(x, 3.0));
  const auto out = tape.Evaluate({{"x", Tensor::FromRows({{5.0, -1.0}})}});
  CHECK(out.at("y").at(0, 0) == 15.0);
  CHECK(out.at("y").at(0, 1) == -3.0);
}

TEST_CASE("evaluate: shape mismatch names the offending operation") {
  Tape tape;
  Var a = tape.Input("a", Tensor(2, 3));
  Var b = tape.Input("b", Tensor(4, 2));
  CHECK_THROWS_WITH_AS(tape.MatMul(a, b), doctest::Contains("MatMul"), Error);
}

TEST_CASE("gradients: d(x*x)/dx at 3 is 6") {
  ParamStore store;
  store.Create("x", 1, 1).value.at(0, 0) = 3.0;
  Tape tape;
  Var x = tape.Param(store, "x");
  Var loss = tape.Sum(tape.Mul(x, x));
  const auto grads = tape.Gradients(loss, {"x"});
  CHECK(grads.at("x").at(0, 0) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("gradients: sum of softmax has an all-zero gradient") {
  Rng rng(13);
  ParamStore store;
  store.Create("x", 1, 6);
  for (int i = 0; i < 6; ++i) store.GetMutable("x").value[i] = 4.0 * rng.Uniform() - 2.0;
  Tape tape;
  Var loss = tape.Sum(tape.Softmax(tape.Param(store, "x")));
  const auto grads = tape.Gradients(loss, {"x"});
  for (int i = 0; i < 6; ++i) CHECK(std::fabs(grads.at("x")[i]) < 1e-12);
}

TEST_CASE("gradients: params outside the requested set are not returned or touched") {
  ParamStore store;
  store.Create("a", 1, 1).value.at(0, 0) = 2.0;
  store.Create("b", 1, 1).value.at(0, 0) = 5.0;
  Tape tape;
  Var loss = tape.Sum(tape.Mul(tape.Param(store, "a"), tape.Param(store, "b")));
  const auto grads = tape.Gradients(loss, {"a"});
  CHECK(grads.size() == 1);
  CHECK(grads.count("a") == 1);
  CHECK(store.Value("b").at(0, 0) == 5.0);
}

TEST_CASE("gradients: requesting a param that is not on the tape is an error") {
  ParamStore store;
  store.Create("a", 1, 1);
  store.Create("orphan", 1, 1);
  Tape tape;
  Var loss = tape.Sum(tape.Param(store, "a"));
  CHECK_THROWS_WITH_AS(tape.Gradients(loss, {"orphan"}), doctest::Contains("orphan"), Error);
}

TEST_CASE("gradients: loss must be scalar") {
  ParamStore store;
  store.Create("a", 2, 2);
  Tape tape;
  Var v = tape.Param(store, "a");
  CHECK_THROWS_AS((void)tape.Gradients(v, {"a"}), Error);
}

TEST_CASE("finite differences: linear loss is exact to 1e-9") {
  Rng rng(14);
  const Tensor x = RandomTensor(1, 4, &rng);
  ParamStore store;
  store.Create("w", 1, 4);
  for (int i = 0; i < 4; ++i) store.GetMutable("w").value[i] = rng.Uniform();

  const double err = FiniteDifferenceCheck(
      [&x](const ParamStore& s, std::map<std::string, Tensor>* grads) {
        Tape tape;
        Var w = tape.Param(s, "w");
        Var loss = tape.Sum(tape.Mul(w, tape.Constant(x)));
        if (grads) *grads = tape.Gradients(loss, {"w"});
        return loss.value().at(0, 0);
      },
      &store, {"w"}, 1e-5);
  CHECK(err < 1e-9);
}

TEST_CASE("finite differences: two-layer FFN cross-entropy under 1e-5") {
  Rng rng(15);
  const Tensor batch = RandomTensor(5, 6, &rng);
  const std::vector<int> targets = {0, 3, 1, 2, 3};
  ParamStore store;
  auto init = [&rng, &store](const std::string& name, int r, int c) {
    Param& p = store.Create(name, r, c);
    for (int i = 0; i < p.value.size(); ++i) p.value[i] = 0.4 * (2.0 * rng.Uniform() - 1.0);
  };
  init("w1", 6, 8);
  init("b1", 1, 8);
  init("w2", 8, 4);
  init("b2", 1, 4);

  const std::vector<std::string> names = {"w1", "b1", "w2", "b2"};
  const double err = FiniteDifferenceCheck(
      [&](const ParamStore& s, std::map<std::string, Tensor>* grads) {
        Tape tape;
        Var h = tape.Relu(
            tape.Add(tape.MatMul(tape.Constant(batch), tape.Param(s, "w1")),
                     tape.Param(s, "b1")));
        Var logits =
            tape.Add(tape.MatMul(h, tape.Param(s, "w2")), tape.Param(s, "b2"));
        Var loss = tape.Scale(tape.Sum(tape.Pick(tape.LogSoftmax(logits), targets)), -1.0);
        if (grads) *grads = tape.Gradients(loss, names);
        return loss.value().at(0, 0);
      },
      &store, names, 1e-5);
  CHECK(err < 1e-5);
}

TEST_CASE("finite differences: every primitive on randomized shapes") {
  Rng rng(16);
  // Each scenario builds a scalar loss that routes through one primitive;
  // shapes are randomized up to 8x8 per the module contract.
  auto check = [](const char* what,
                  const std::function<Var(Tape*, const ParamStore&)>& build,
                  ParamStore* store, std::vector<std::string> names = {},
                  double tol = 1e-5) {
    if (names.empty()) names = store->Names();
    const double err = FiniteDifferenceCheck(
        [&](const ParamStore& s, std::map<std::string, Tensor>* grads) {
          Tape tape;
          Var loss = build(&tape, s);
          if (grads) *grads = tape.Gradients(loss, names);
          return loss.value().at(0, 0);
        },
        store, names, 1e-5);
    INFO(what);
    CHECK(err < tol);
  };

  const int rows = 2 + static_cast<int>(rng.Uniform() * 6.0);
  const int cols = 2 + static_cast<int>(rng.Uniform() * 6.0);
  const int inner = 2 + static_cast<int>(rng.Uniform() * 6.0);

  {
    ParamStore s;
    s.Create("a", rows, inner);
    s.Create("b", inner, cols);
    for (auto& [name, p] : s)
      for (int i = 0; i < p.value.size(); ++i) p.value[i] = 2.0 * rng.Uniform() - 1.0;
    check("matmul + gelu", [](Tape* t, const ParamStore& s) {
      return t->Sum(t->Gelu(t->MatMul(t->Param(s, "a"), t->Param(s, "b"))));
    }, &s);
  }
  {
    ParamStore s;
    s.Create("a", rows, inner);
    for (auto& [name, p] : s)
      for (int i = 0; i < p.value.size(); ++i) p.value[i] = 2.0 * rng.Uniform() - 1.0;
    check("transpose", [](Tape* t, const ParamStore& s) {
      return t->Sum(t->MatMul(t->Transpose(t->Param(s, "a")), t->Param(s, "a")));
    }, &s);
  }
  {
    ParamStore s;
    s.Create("x", rows, cols);
    s.Create("row", 1, cols);
    for (auto& [name, p] : s)
      for (int i = 0; i < p.value.size(); ++i) p.value[i] = 2.0 * rng.Uniform() - 1.0;
    check("broadcast add + mul + scale + relu", [](Tape* t, const ParamStore& s) {
      Var x = t->Param(s, "x");
      Var y = t->Add(x, t->Param(s, "row"));
      return t->Sum(t->Relu(t->Scale(t->Mul(y, y), 0.7)));
    }, &s);
    check("softmax row-wise", [](Tape* t, const ParamStore& s) {
      Var probs = t->Softmax(t->Param(s, "x"));
      return t->Sum(t->Mul(probs, probs));
    }, &s, {"x"});
    check("log-softmax + pick", [rows, cols](Tape* t, const ParamStore& s) {
      std::vector<int> ids;
      for (int i = 0; i < rows; ++i) ids.push_back(i % cols);
      return t->Scale(t->Sum(t->Pick(t->LogSoftmax(t->Param(s, "x")), ids)), -1.0);
    }, &s, {"x"});
  }
  {
    ParamStore s;
    s.Create("x", rows, cols);
    s.Create("gain", 1, cols);
    s.Create("bias", 1, cols);
    for (auto& [name, p] : s)
      for (int i = 0; i < p.value.size(); ++i) p.value[i] = 2.0 * rng.Uniform() - 1.0;
    // Keep gains away from zero so layer-norm gradients are well scaled.
    for (int i = 0; i < cols; ++i) s.GetMutable("gain").value[i] += 2.0;
    check("layernorm", [](Tape* t, const ParamStore& s) {
      return t->Sum(t->Gelu(
          t->LayerNorm(t->Param(s, "x"), t->Param(s, "gain"), t->Param(s, "bias"))));
    }, &s);
  }
  {
    ParamStore s;
    s.Create("table", 5, cols);
    for (auto& [name, p] : s)
      for (int i = 0; i < p.value.size(); ++i) p.value[i] = 2.0 * rng.Uniform() - 1.0;
    check("embed + concat + slice", [cols](Tape* t, const ParamStore& s) {
      Var e = t->Embed(t->Param(s, "table"), {1, 4, 2});
      Var cat = t->Concat(e, t->Scale(e, 0.5), 1);
      return t->Sum(t->Gelu(t->Slice(cat, 1, cols / 2, cols)));
    }, &s);
  }
  {
    ParamStore s;
    s.Create("scores", 4, 3);
    for (auto& [name, p] : s)
      for (int i = 0; i < p.value.size(); ++i) p.value[i] = 2.0 * rng.Uniform() - 1.0;
    check("ctc loss", [](Tape* t, const ParamStore& s) {
      Var logp = t->LogSoftmax(t->Param(s, "scores"));
      return t->CtcLoss(logp, {0, 1}, /*blank=*/2);
    }, &s, {}, 1e-4);
  }
}

TEST_CASE("finite differences: non-finite loss is an error") {
  ParamStore store;
  store.Create("x", 1, 1).value.at(0, 0) = 0.0;
  CHECK_THROWS_AS(
      FiniteDifferenceCheck(
          [](const ParamStore&, std::map<std::string, Tensor>* grads) {
            if (grads) (*grads)["x"] = Tensor(1, 1);
            return std::numeric_limits<double>::quiet_NaN();
          },
          &store, {"x"}, 1e-5),
      Error);
}

TEST_CASE("oracle cross-check: central difference helper agrees on a cubic") {
  const auto f = [](double x) { return x * x * x; };
  const double d = oracles::CentralDifference(f, 2.0);
  CHECK(d == doctest::Approx(12.0).epsilon(1e-8));
}

}  // namespace
}  // namespace ilmefuse
