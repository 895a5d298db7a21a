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

#ifndef VFLSIM_TESTS_SUPPORT_PRIMITIVE_CASES_HPP_
#define VFLSIM_TESTS_SUPPORT_PRIMITIVE_CASES_HPP_

#include <string>
#include <vector>

#include "vflsim/ndcore/grad_check.hpp"
#include "vflsim/ndcore/rng.hpp"
#include "vflsim/ndcore/tape.hpp"

// Gradient-check programs, one or more per tape primitive.
namespace vflsim::testing_support {

inline Tensor2 RandomTensor(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                     double hi = 1.0) {
  Tensor2 t(r, c);
  for (double& v : t.values()) v = rng.Uniform(lo, hi);
  return t;
}

// Reduces any tensor to a scalar through fixed random weights so every
// output entry gets a distinct upstream gradient.
inline ValueId WeightedSum(Tape& tape, ValueId v, std::uint64_t seed) {
  const Tensor2& x = tape.value(v);
  Rng rng(seed);
  ValueId w = tape.Leaf(RandomTensor(x.rows(), x.cols(), rng));
  return Sum(tape, Mul(tape, v, w));
}

struct PrimitiveCase {
  std::string name;
  Tensor2 point;
  ScalarProgram program;
};

inline std::vector<PrimitiveCase> PrimitiveCases() {
  Rng rng(17);
  Tensor2 other34 = RandomTensor(3, 4, rng);
  Tensor2 right45 = RandomTensor(4, 5, rng);
  Tensor2 left23 = RandomTensor(2, 3, rng);
  Tensor2 row14 = RandomTensor(1, 4, rng);
  Tensor2 col31 = RandomTensor(3, 1, rng);
  Tensor2 positive34 = RandomTensor(3, 4, rng, 0.5, 2.0);
  Tensor2 target31 = RandomTensor(3, 1, rng);
  // Values bounded away from the ReLU kink.
  Tensor2 relu_point = RandomTensor(3, 4, rng);
  for (double& v : relu_point.values()) v = v >= 0 ? v + 0.1 : v - 0.1;

  std::vector<PrimitiveCase> cases;
  auto add = [&](std::string name, Tensor2 point, ScalarProgram p) {
    cases.push_back({std::move(name), std::move(point), std::move(p)});
  };
  add("matmul_left", RandomTensor(3, 4, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, MatMul(t, x, t.Leaf(right45)), 1);
  });
  add("matmul_right", RandomTensor(3, 4, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, MatMul(t, t.Leaf(left23), x), 2);
  });
  add("add_same", RandomTensor(3, 4, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, Add(t, x, t.Leaf(other34)), 3);
  });
  add("add_row_broadcast", RandomTensor(1, 4, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, Add(t, t.Leaf(other34), x), 4);
  });
  add("sub_col_broadcast", RandomTensor(3, 1, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, Sub(t, t.Leaf(other34), x), 5);
  });
  add("sub_left", RandomTensor(3, 4, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, Sub(t, x, t.Leaf(row14)), 6);
  });
  add("mul_left", RandomTensor(3, 4, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, Mul(t, x, t.Leaf(col31)), 7);
  });
  add("mul_scalar_broadcast", RandomTensor(1, 1, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, Mul(t, t.Leaf(other34), x), 8);
  });
  add("div_numerator", RandomTensor(3, 4, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, Div(t, x, t.Leaf(positive34)), 9);
  });
  add("div_denominator", RandomTensor(1, 4, rng, 0.5, 2.0), [=](Tape& t, ValueId x) {
    return WeightedSum(t, Div(t, t.Leaf(other34), x), 10);
  });
  add("scale", RandomTensor(3, 4, rng), [](Tape& t, ValueId x) {
    return WeightedSum(t, Scale(t, x, -2.5), 11);
  });
  add("relu", relu_point, [](Tape& t, ValueId x) { return WeightedSum(t, Relu(t, x), 12); });
  add("concat_cols", RandomTensor(3, 2, rng), [=](Tape& t, ValueId x) {
    return WeightedSum(t, ConcatCols(t, t.Leaf(other34), x), 13);
  });
  add("slice_cols", RandomTensor(3, 5, rng), [](Tape& t, ValueId x) {
    return WeightedSum(t, SliceCols(t, x, 1, 4), 14);
  });
  add("row_mean", RandomTensor(3, 4, rng), [](Tape& t, ValueId x) {
    return WeightedSum(t, RowMean(t, x), 15);
  });
  add("col_mean", RandomTensor(3, 4, rng), [](Tape& t, ValueId x) {
    return WeightedSum(t, ColMean(t, x), 16);
  });
  add("mean_all", RandomTensor(3, 4, rng), [](Tape& t, ValueId x) {
    return Scale(t, MeanAll(t, x), 3.0);
  });
  add("sum", RandomTensor(3, 4, rng), [](Tape& t, ValueId x) {
    return Scale(t, Sum(t, x), 0.5);
  });
  add("sqrt_eps", positive34, [](Tape& t, ValueId x) {
    return WeightedSum(t, SqrtEps(t, x), 17);
  });
  add("sqrt", positive34, [](Tape& t, ValueId x) { return WeightedSum(t, Sqrt(t, x), 18); });
  add("pairwise_sq_dist", RandomTensor(5, 3, rng), [](Tape& t, ValueId x) {
    return WeightedSum(t, PairwiseSqDist(t, x), 19);
  });
  add("softmax_cross_entropy", RandomTensor(4, 3, rng), [](Tape& t, ValueId x) {
    std::vector<int> labels{0, 2, 1, 2};
    return SoftmaxCrossEntropy(t, x, labels);
  });
  add("mse", RandomTensor(3, 1, rng), [=](Tape& t, ValueId x) { return Mse(t, x, target31); });
  return cases;
}

}  // namespace vflsim::testing_support

#endif  // VFLSIM_TESTS_SUPPORT_PRIMITIVE_CASES_HPP_
