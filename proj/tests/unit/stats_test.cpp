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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/oracles.hpp"
#include "vflsim/ndcore/rng.hpp"
#include "vflsim/stats.hpp"

namespace vflsim {
namespace {

Tensor2 Random(std::size_t r, std::size_t c, Rng& rng) {
  Tensor2 t(r, c);
  for (double& v : t.values()) v = rng.Normal();
  return t;
}

oracle::Matrix ToMatrix(const Tensor2& t) {
  oracle::Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  return m;
}

TEST(DistanceCorrelationTest, MatchesDoubleCenteringOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + rng.Below(40);
    Tensor2 x = Random(n, 1 + rng.Below(5), rng);
    Tensor2 y = Random(n, 1 + rng.Below(5), rng);
    // Mix in some dependence.
    for (std::size_t i = 0; i < n; ++i) y(i, 0) += 0.7 * x(i, 0);
    EXPECT_NEAR(DistanceCorrelation(x, y),
                oracle::DistanceCorrelation(ToMatrix(x), ToMatrix(y)), 1e-9);
  }
}

TEST(DistanceCorrelationTest, IdenticalInputsGiveOne) {
  Rng rng(1);
  Tensor2 x = Random(20, 3, rng);
  EXPECT_NEAR(DistanceCorrelation(x, x), 1.0, 1e-12);
}

TEST(DistanceCorrelationTest, InvariantToSimilarityTransforms) {
  Rng rng(2);
  Tensor2 x = Random(25, 2, rng);
  Tensor2 y = Random(25, 2, rng);
  for (std::size_t i = 0; i < 25; ++i) y(i, 1) += x(i, 0) * x(i, 0);
  Tensor2 moved(25, 2);
  const double c = std::cos(0.7), s = std::sin(0.7);
  for (std::size_t i = 0; i < 25; ++i) {
    moved(i, 0) = 3.0 * (c * x(i, 0) - s * x(i, 1)) + 5.0;
    moved(i, 1) = 3.0 * (s * x(i, 0) + c * x(i, 1)) - 2.0;
  }
  EXPECT_NEAR(DistanceCorrelation(x, y), DistanceCorrelation(moved, y), 1e-12);
}

TEST(DistanceCorrelationTest, ConstantSideIsZero) {
  Rng rng(3);
  Tensor2 x = Random(10, 2, rng);
  EXPECT_EQ(DistanceCorrelation(x, Tensor2(10, 3, 4.0)), 0.0);
  EXPECT_EQ(DistanceCorrelation(Tensor2(10, 1, 1.0), x), 0.0);
}

TEST(DistanceCorrelationTest, BoundedAndSymmetric) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor2 x = Random(12, 3, rng);
    Tensor2 y = Random(12, 2, rng);
    double a = DistanceCorrelation(x, y);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0 + 1e-12);
    EXPECT_NEAR(a, DistanceCorrelation(y, x), 1e-12);
  }
}

TEST(DistanceCorrelationTest, Errors) {
  EXPECT_THROW(DistanceCorrelation(Tensor2(3, 2), Tensor2(4, 2)), DimensionError);
  EXPECT_THROW(DistanceCorrelation(Tensor2(1, 2), Tensor2(1, 2)), ContractError);
}

TEST(LabelEncodingTest, OneHotAndScalar) {
  std::vector<int> y{0, 2, 1};
  EXPECT_EQ(OneHot(y, 3), Tensor2::FromRows({{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
  EXPECT_EQ((LabelEncoding{LabelMode::kScalar, 3}.Encode(y)),
            Tensor2::FromRows({{0}, {2}, {1}}));
  std::vector<int> bad{3};
  EXPECT_THROW(OneHot(bad, 3), ContractError);
}

TEST(PearsonTest, MatchesOracle) {
  Rng rng(5);
  Tensor2 e = Random(50, 4, rng);
  std::vector<int> labels(50);
  for (int& v : labels) v = static_cast<int>(rng.Below(3));
  for (std::size_t i = 0; i < 50; ++i) e(i, 1) += labels[i];
  PearsonResult pr = PearsonPerDimension(e, labels);
  std::vector<double> y(labels.begin(), labels.end());
  for (std::size_t c = 0; c < 4; ++c) {
    std::vector<double> col(50);
    for (std::size_t i = 0; i < 50; ++i) col[i] = e(i, c);
    EXPECT_NEAR(pr.r[c], oracle::Pearson(col, y), 1e-12);
    EXPECT_LE(std::abs(pr.r[c]), 1.0);
  }
  EXPECT_FALSE(pr.has_warning());
}

TEST(PearsonTest, ConstantDimensionWarnsAndReportsZero) {
  Tensor2 e = Tensor2::FromRows({{1, 5}, {2, 5}, {3, 5}});
  std::vector<int> y{0, 1, 1};
  PearsonResult pr = PearsonPerDimension(e, y);
  EXPECT_EQ(pr.r[1], 0.0);
  EXPECT_TRUE(pr.zero_variance[1]);
  EXPECT_TRUE(pr.has_warning());
  std::vector<int> flat{1, 1, 1};
  EXPECT_THROW(PearsonPerDimension(e, flat), ContractError);
}

TEST(AccuracyTest, OverallAndPerClass) {
  std::vector<int> pred{0, 1, 1, 2};
  std::vector<int> truth{0, 1, 0, 2};
  EXPECT_DOUBLE_EQ(Accuracy(pred, truth), 0.75);
  auto per = PerClassAccuracy(pred, truth, 4);
  EXPECT_DOUBLE_EQ(*per[0], 0.5);
  EXPECT_DOUBLE_EQ(*per[1], 1.0);
  EXPECT_DOUBLE_EQ(*per[2], 1.0);
  EXPECT_FALSE(per[3].has_value());
  std::vector<int> empty;
  EXPECT_THROW(Accuracy(empty, empty), ContractError);
  EXPECT_THROW(Accuracy(pred, empty), ContractError);
}

}  // namespace
}  // namespace vflsim
