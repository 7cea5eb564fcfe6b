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

#ifndef ILMEFUSE_KERNELS_H_
#define ILMEFUSE_KERNELS_H_

#include "ilmefuse/tensor.h"

// Dense kernels shared by the autodiff tape and the incremental scoring
// path. Both paths must produce bit-identical numbers, so every kernel
// processes rows independently and accumulates in a fixed order.
namespace ilmefuse::kernels {

inline constexpr double kLayerNormEps = 1e-5;

Tensor MatMul(const Tensor& a, const Tensor& b);
// c[i, j] = sum_k a[i, k] * b[j, k]; identical accumulation order as
// MatMul(a, Transpose(b)).
Tensor MatMulNT(const Tensor& a, const Tensor& b);
Tensor Transpose(const Tensor& a);
// b may be 1 x C to broadcast over a's rows.
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double s);
Tensor LayerNorm(const Tensor& x, const Tensor& gain, const Tensor& bias);
Tensor Softmax(const Tensor& x);
Tensor LogSoftmax(const Tensor& x);
Tensor Relu(const Tensor& x);
Tensor Gelu(const Tensor& x);

double GeluScalar(double x);
double GeluGradScalar(double x);

// log(exp(a) + exp(b)) with -inf handled exactly.
double LogAdd(double a, double b);

}  // namespace ilmefuse::kernels

#endif  // ILMEFUSE_KERNELS_H_
