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

// Dependence measures and evaluation metrics.

#ifndef VFLSIM_STATS_HPP_
#define VFLSIM_STATS_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vflsim/errors.hpp"
#include "vflsim/ndcore/tape.hpp"
#include "vflsim/ndcore/tensor.hpp"

namespace vflsim {

// Below this distance variance the distance correlation is defined as 0.
inline constexpr double kDegenerateDistanceVariance = 1e-12;

enum class LabelMode { kOneHot, kScalar };

struct LabelEncoding {
  LabelMode mode = LabelMode::kOneHot;
  int class_count = 2;

  Tensor2 Encode(std::span<const int> labels) const {
    if (class_count < 1) throw ContractError("LabelEncoding: class_count < 1");
    const std::size_t width = mode == LabelMode::kOneHot ? class_count : 1;
    Tensor2 out(labels.size(), width);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= class_count) {
        throw ContractError("LabelEncoding: label " + std::to_string(labels[i]) +
                            " outside [0, " + std::to_string(class_count) + ")");
      }
      if (mode == LabelMode::kOneHot) {
        out(i, labels[i]) = 1.0;
      } else {
        out(i, 0) = labels[i];
      }
    }
    return out;
  }
};

inline Tensor2 OneHot(std::span<const int> labels, int class_count) {
  return LabelEncoding{LabelMode::kOneHot, class_count}.Encode(labels);
}

namespace detail {

// Euclidean distance matrix, double-centered.
inline ValueId CenteredDistances(Tape& tape, ValueId x) {
  ValueId d = Sqrt(tape, PairwiseSqDist(tape, x));
  ValueId centered = Sub(tape, Sub(tape, d, RowMean(tape, d)), ColMean(tape, d));
  return Add(tape, centered, MeanAll(tape, d));
}

}  // namespace detail

// Sample distance correlation between the rows of x (n x p) and y (n x q),
// recorded on `tape` so it can be differentiated with respect to either side.
// Distances are exact in the forward pass; the square-root adjoint is
// regularized so coincident rows contribute a zero gradient.
inline ValueId DistanceCorrelation(Tape& tape, ValueId x, ValueId y) {
  const Tensor2& xv = tape.value(x);
  const Tensor2& yv = tape.value(y);
  if (xv.rows() != yv.rows()) {
    throw DimensionError("distance_correlation: " + xv.ShapeString() + " vs " +
                         yv.ShapeString());
  }
  if (xv.rows() < 2) {
    throw ContractError("distance_correlation: need at least 2 rows, got " +
                        std::to_string(xv.rows()));
  }
  ValueId a = detail::CenteredDistances(tape, x);
  ValueId b = detail::CenteredDistances(tape, y);
  ValueId dcov2 = MeanAll(tape, Mul(tape, a, b));
  ValueId dvar2_x = MeanAll(tape, Mul(tape, a, a));
  ValueId dvar2_y = MeanAll(tape, Mul(tape, b, b));
  const double limit = kDegenerateDistanceVariance * kDegenerateDistanceVariance;
  if (tape.value(dvar2_x).item() < limit || tape.value(dvar2_y).item() < limit) {
    return tape.Leaf(Tensor2::Scalar(0.0));
  }
  ValueId denom = Sqrt(tape, Mul(tape, dvar2_x, dvar2_y));
  return Sqrt(tape, Div(tape, dcov2, denom));
}

inline double DistanceCorrelation(const Tensor2& x, const Tensor2& y) {
  Tape tape;
  ValueId xi = tape.Leaf(x);
  ValueId yi = tape.Leaf(y);
  return tape.value(DistanceCorrelation(tape, xi, yi)).item();
}

struct PearsonResult {
  std::vector<double> r;
  // Columns with zero variance; their r is reported as 0.
  std::vector<bool> zero_variance;

  bool has_warning() const {
    for (bool z : zero_variance)
      if (z) return true;
    return false;
  }
};

// Column-wise Pearson correlation of `embedding` against scalar labels.
inline PearsonResult PearsonPerDimension(const Tensor2& embedding,
                                         std::span<const int> labels) {
  const std::size_t n = embedding.rows();
  if (labels.size() != n) {
    throw DimensionError("pearson: " + std::to_string(labels.size()) +
                         " labels for " + embedding.ShapeString());
  }
  if (n < 2) throw ContractError("pearson: need at least 2 rows");
  double ymean = 0.0;
  for (int v : labels) ymean += v;
  ymean /= static_cast<double>(n);
  double syy = 0.0;
  for (int v : labels) syy += (v - ymean) * (v - ymean);
  if (syy == 0.0) throw ContractError("pearson: labels are constant");

  PearsonResult out;
  out.r.assign(embedding.cols(), 0.0);
  out.zero_variance.assign(embedding.cols(), false);
  for (std::size_t c = 0; c < embedding.cols(); ++c) {
    double xmean = 0.0;
    for (std::size_t i = 0; i < n; ++i) xmean += embedding(i, c);
    xmean /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = embedding(i, c) - xmean;
      sxx += dx * dx;
      sxy += dx * (labels[i] - ymean);
    }
    if (sxx <= 0.0) {
      out.zero_variance[c] = true;
      continue;
    }
    double r = sxy / std::sqrt(sxx * syy);
    out.r[c] = std::max(-1.0, std::min(1.0, r));
  }
  return out;
}

inline double Accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) {
    throw ContractError("accuracy: " + std::to_string(predicted.size()) +
                        " predictions for " + std::to_string(truth.size()) +
                        " labels");
  }
  if (truth.empty()) throw ContractError("accuracy: no samples");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

// Per-class recall. Classes absent from `truth` are reported as nullopt.
inline std::vector<std::optional<double>> PerClassAccuracy(
    std::span<const int> predicted, std::span<const int> truth,
    int class_count) {
  if (predicted.size() != truth.size()) {
    throw ContractError("per_class_accuracy: length mismatch");
  }
  std::vector<std::size_t> total(class_count, 0);
  std::vector<std::size_t> hit(class_count, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= class_count) {
      throw ContractError("per_class_accuracy: label out of range");
    }
    ++total[truth[i]];
    hit[truth[i]] += predicted[i] == truth[i];
  }
  std::vector<std::optional<double>> out(class_count);
  for (int c = 0; c < class_count; ++c) {
    if (total[c] > 0) out[c] = static_cast<double>(hit[c]) / static_cast<double>(total[c]);
  }
  return out;
}

}  // namespace vflsim

#endif  // VFLSIM_STATS_HPP_
