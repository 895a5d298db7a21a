// Copyright 2026 The vflsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VFLSIM_NDCORE_TENSOR_HPP_
#define VFLSIM_NDCORE_TENSOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vflsim/errors.hpp"

namespace vflsim {

// Dense row-major matrix of doubles. Every feature block, embedding,
// parameter and gradient in the simulator is one of these.
class Tensor2 {
 public:
  Tensor2() = default;

  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
      throw DimensionError("Tensor2: " + std::to_string(values_.size()) +
                           " values for a " + std::to_string(rows_) + "x" +
                           std::to_string(cols_) + " matrix");
    }
  }

  static Tensor2 FromRows(
      std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> values;
    values.reserve(r * c);
    for (const auto& row : rows) {
      if (row.size() != c) throw DimensionError("Tensor2::FromRows: ragged");
      values.insert(values.end(), row.begin(), row.end());
    }
    return Tensor2(r, c, std::move(values));
  }

  static Tensor2 Scalar(double v) { return Tensor2(1, 1, v); }

  static Tensor2 Identity(std::size_t n) {
    Tensor2 t(n, n);
    for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) {
    return values_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> row(std::size_t r) {
    return std::span<double>(values_).subspan(r * cols_, cols_);
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }

  // Scalar value of a 1x1 tensor.
  double item() const {
    if (rows_ != 1 || cols_ != 1) {
      throw ContractError("Tensor2::item on a " + ShapeString() + " tensor");
    }
    return values_[0];
  }

  bool AllFinite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  bool SameShape(const Tensor2& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  std::string ShapeString() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

  // Gathers the listed rows into a new tensor.
  Tensor2 GatherRows(std::span<const std::size_t> indices) const {
    Tensor2 out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (indices[i] >= rows_) {
        throw DimensionError("Tensor2::GatherRows: row " +
                             std::to_string(indices[i]) + " out of " +
                             std::to_string(rows_));
      }
      auto src = row(indices[i]);
      std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
  }

  Tensor2 SliceCols(std::size_t begin, std::size_t end) const {
    if (begin > end || end > cols_) {
      throw DimensionError("Tensor2::SliceCols: [" + std::to_string(begin) +
                           ", " + std::to_string(end) + ") of " +
                           std::to_string(cols_) + " columns");
    }
    Tensor2 out(rows_, end - begin);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = begin; c < end; ++c) out(r, c - begin) = (*this)(r, c);
    }
    return out;
  }

  friend bool operator==(const Tensor2& a, const Tensor2& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.values_ == b.values_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline Tensor2 ConcatColumns(const Tensor2& a, const Tensor2& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("ConcatColumns: " + a.ShapeString() + " vs " +
                         b.ShapeString());
  }
  Tensor2 out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + a.cols());
  }
  return out;
}

inline double MaxAbsDifference(const Tensor2& a, const Tensor2& b) {
  if (!a.SameShape(b)) {
    throw DimensionError("MaxAbsDifference: " + a.ShapeString() + " vs " +
                         b.ShapeString());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  }
  return worst;
}

}  // namespace vflsim

#endif  // VFLSIM_NDCORE_TENSOR_HPP_
