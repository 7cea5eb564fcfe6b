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

#ifndef ILMEFUSE_TENSOR_H_
#define ILMEFUSE_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ilmefuse/common.h"

namespace ilmefuse {

// Dense row-major matrix of doubles. Everything in the toolkit is rank 1 or
// 2; vectors are stored as 1 x n.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols) : rows_(rows), cols_(cols), data_(Count(rows, cols), 0.0) {}
  Tensor(int rows, int cols, std::vector<double> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    Check(static_cast<size_t>(rows_) * cols_ == data_.size(),
          "Tensor: shape ", rows_, "x", cols_, " does not match ", data_.size(), " values");
  }

  static Tensor Row(std::initializer_list<double> values) {
    return Tensor(1, static_cast<int>(values.size()), std::vector<double>(values));
  }
  static Tensor FromRows(std::initializer_list<std::initializer_list<double>> rows) {
    Check(rows.size() > 0, "Tensor: FromRows needs at least one row");
    Tensor t(static_cast<int>(rows.size()), static_cast<int>(rows.begin()->size()));
    int r = 0;
    for (const auto& row : rows) {
      Check(static_cast<int>(row.size()) == t.cols_, "Tensor: ragged rows in FromRows");
      int c = 0;
      for (double v : row) t.at(r, c++) = v;
      ++r;
    }
    return t;
  }
  static Tensor Full(int rows, int cols, double value) {
    Tensor t(rows, cols);
    for (double& x : t.data_) x = value;
    return t;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return static_cast<int>(data_.size()); }

  double& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }
  double& operator[](int i) { return data_[i]; }
  double operator[](int i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const double* row(int r) const { return data_.data() + static_cast<size_t>(r) * cols_; }

  bool SameShape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool AllFinite() const;

  bool operator==(const Tensor& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

 private:
  static size_t Count(int rows, int cols) {
    Check(rows >= 0 && cols >= 0, "Tensor: negative extent ", rows, "x", cols);
    return static_cast<size_t>(rows) * cols;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

}  // namespace ilmefuse

#endif  // ILMEFUSE_TENSOR_H_
