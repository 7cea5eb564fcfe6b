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

#include "ilmefuse/tensor.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ilmefuse/kernels.h"

namespace ilmefuse {

bool Tensor::AllFinite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

namespace kernels {

Tensor MatMul(const Tensor& a, const Tensor& b) {
  Check(a.cols() == b.rows(), "MatMul: inner extents differ, ", a.rows(), "x", a.cols(),
        " vs ", b.rows(), "x", b.cols());
  Tensor c(a.rows(), b.cols());
  const int n = a.rows(), k = a.cols(), m = b.cols();
  for (int i = 0; i < n; ++i) {
    const double* ar = a.row(i);
    double* cr = c.row(i);
    for (int j = 0; j < m; ++j) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += ar[t] * b.at(t, j);
      cr[j] = acc;
    }
  }
  return c;
}

Tensor MatMulNT(const Tensor& a, const Tensor& b) {
  Check(a.cols() == b.cols(), "MatMulNT: inner extents differ");
  Tensor c(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const double* ar = a.row(i);
    double* cr = c.row(i);
    for (int j = 0; j < b.rows(); ++j) {
      const double* br = b.row(j);
      double acc = 0.0;
      for (int t = 0; t < a.cols(); ++t) acc += ar[t] * br[t];
      cr[j] = acc;
    }
  }
  return c;
}

Tensor Transpose(const Tensor& a) {
  Tensor c(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) c.at(j, i) = a.at(i, j);
  }
  return c;
}

Tensor Add(const Tensor& a, const Tensor& b) {
  if (a.SameShape(b)) {
    Tensor c = a;
    for (int i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
  }
  Check(b.rows() == 1 && b.cols() == a.cols(),
        "Add: shapes ", a.rows(), "x", a.cols(), " and ", b.rows(), "x", b.cols(),
        " are neither equal nor row-broadcastable");
  Tensor c = a;
  for (int i = 0; i < a.rows(); ++i) {
    double* cr = c.row(i);
    for (int j = 0; j < a.cols(); ++j) cr[j] += b[j];
  }
  return c;
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  Check(a.SameShape(b), "Mul: shape mismatch");
  Tensor c = a;
  for (int i = 0; i < c.size(); ++i) c[i] *= b[i];
  return c;
}

Tensor Scale(const Tensor& a, double s) {
  Tensor c = a;
  for (int i = 0; i < c.size(); ++i) c[i] *= s;
  return c;
}

Tensor LayerNorm(const Tensor& x, const Tensor& gain, const Tensor& bias) {
  Check(gain.rows() == 1 && gain.cols() == x.cols() && bias.rows() == 1 &&
            bias.cols() == x.cols(),
        "LayerNorm: gain/bias must be 1x", x.cols());
  Tensor y(x.rows(), x.cols());
  const int d = x.cols();
  for (int i = 0; i < x.rows(); ++i) {
    const double* xr = x.row(i);
    double* yr = y.row(i);
    double mean = 0.0;
    for (int j = 0; j < d; ++j) mean += xr[j];
    mean /= d;
    double var = 0.0;
    for (int j = 0; j < d; ++j) {
      const double dx = xr[j] - mean;
      var += dx * dx;
    }
    var /= d;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    for (int j = 0; j < d; ++j) yr[j] = (xr[j] - mean) * inv * gain[j] + bias[j];
  }
  return y;
}

Tensor Softmax(const Tensor& x) {
  Tensor y(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    const double* xr = x.row(i);
    double* yr = y.row(i);
    double m = xr[0];
    for (int j = 1; j < x.cols(); ++j) m = std::max(m, xr[j]);
    double s = 0.0;
    for (int j = 0; j < x.cols(); ++j) {
      yr[j] = std::exp(xr[j] - m);
      s += yr[j];
    }
    for (int j = 0; j < x.cols(); ++j) yr[j] /= s;
  }
  return y;
}

Tensor LogSoftmax(const Tensor& x) {
  Tensor y(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    const double* xr = x.row(i);
    double* yr = y.row(i);
    double m = xr[0];
    for (int j = 1; j < x.cols(); ++j) m = std::max(m, xr[j]);
    double s = 0.0;
    for (int j = 0; j < x.cols(); ++j) s += std::exp(xr[j] - m);
    const double lse = m + std::log(s);
    for (int j = 0; j < x.cols(); ++j) yr[j] = xr[j] - lse;
  }
  return y;
}

Tensor Relu(const Tensor& x) {
  Tensor y = x;
  for (int i = 0; i < y.size(); ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
  return y;
}

double GeluScalar(double x) {
  // tanh approximation
  const double c = 0.7978845608028654;  // sqrt(2/pi)
  const double u = c * (x + 0.044715 * x * x * x);
  return 0.5 * x * (1.0 + std::tanh(u));
}

double GeluGradScalar(double x) {
  const double c = 0.7978845608028654;
  const double u = c * (x + 0.044715 * x * x * x);
  const double t = std::tanh(u);
  const double du = c * (1.0 + 3.0 * 0.044715 * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du;
}

Tensor Gelu(const Tensor& x) {
  Tensor y = x;
  for (int i = 0; i < y.size(); ++i) y[i] = GeluScalar(y[i]);
  return y;
}

double LogAdd(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace kernels
}  // namespace ilmefuse
