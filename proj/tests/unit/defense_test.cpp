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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "vflsim/dataflow.hpp"
#include "vflsim/defense.hpp"

namespace vflsim {
namespace {

using Table = std::vector<std::vector<double>>;

// Independent sort-and-scan: adjacent pairs with the same origin.
std::vector<std::pair<double, double>> SameOriginPairs(const Table& t) {
  std::vector<std::pair<double, int>> v;
  for (int y = 0; y < static_cast<int>(t.size()); ++y)
    for (double x : t[y]) v.push_back({x, y});
  std::sort(v.begin(), v.end());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i - 1].second == v[i].second) out.push_back({v[i - 1].first, v[i].first});
  return out;
}

std::size_t CountKind(const std::vector<Violation>& vs, ViolationKind k) {
  return std::count_if(vs.begin(), vs.end(), [k](const Violation& v) { return v.kind == k; });
}

TEST(ValidatorTest, DegenerateTwoBlockMap) {
  auto map = SoftLabelMap::FromTable({{0.0, 0.4}, {0.6, 1.0}}, 0.0, 1.0);
  auto vs = ValidateSoftLabelMap(map);
  ASSERT_EQ(vs.size(), 2u);
  for (const auto& v : vs) {
    EXPECT_EQ(v.kind, ViolationKind::kSameOriginAdjacent);
    EXPECT_EQ(v.severity, Severity::kWarning);
  }
  EXPECT_EQ(vs[0].values, (std::vector<double>{0.0, 0.4}));
  EXPECT_EQ(vs[1].values, (std::vector<double>{0.6, 1.0}));
}

TEST(ValidatorTest, ThreeBinIllustrationMatchesScanOracle) {
  Table t{{0.2, 0.6, 0.8}, {0.3, 0.4, 0.9}};
  auto vs = ValidateSoftLabelMap(SoftLabelMap::FromTable(t, 0.0, 1.0), true);
  auto expected = SameOriginPairs(t);
  ASSERT_EQ(expected.size(), 2u);
  ASSERT_EQ(vs.size(), 2u);
  EXPECT_EQ(CountKind(vs, ViolationKind::kIntervalTooSmall), 0u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(vs[i].kind, ViolationKind::kSameOriginAdjacent);
    EXPECT_EQ(vs[i].severity, Severity::kError);
    EXPECT_EQ(vs[i].values, (std::vector<double>{expected[i].first, expected[i].second}));
  }
}

TEST(ValidatorTest, AlternatingMapIsClean) {
  auto map = SoftLabelMap::FromTable({{0.0, 0.5}, {0.25, 0.75}}, 0.0, 0.75);
  EXPECT_TRUE(ValidateSoftLabelMap(map).empty());
}

TEST(ValidatorTest, GapsAndRange) {
  auto close = SoftLabelMap::FromTable({{0.0, 0.5}, {0.05, 1.0}}, 0.0, 1.0);
  EXPECT_EQ(CountKind(ValidateSoftLabelMap(close), ViolationKind::kIntervalTooSmall), 1u);
  auto outside = SoftLabelMap::FromTable({{-0.1, 0.5}, {0.25, 0.75}}, 0.0, 1.0);
  EXPECT_EQ(CountKind(ValidateSoftLabelMap(outside), ViolationKind::kValueOutOfRange), 1u);
  EXPECT_THROW(SoftLabelMap::FromTable({{0.0, 0.5}, {0.25}}, 0.0, 1.0), ContractError);
}

TEST(GeneratorTest, ThousandSeedsAreClean) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const int c = 2 + static_cast<int>(seed % 6);
    const int nb = 1 + static_cast<int>((seed / 6) % 4);
    SoftLabelMap map = GenerateSoftLabelMap(c, nb, rng);
    auto vs = ValidateSoftLabelMap(map);
    EXPECT_TRUE(vs.empty()) << "seed " << seed << ": " << vs.front().ToString();
  }
}

TEST(GeneratorTest, CountsAndAlternation) {
  Rng rng(3);
  SoftLabelMap map = GenerateSoftLabelMap(3, 2, rng);
  std::set<double> distinct;
  for (const auto& row : map.table) {
    EXPECT_EQ(row.size(), 2u);
    distinct.insert(row.begin(), row.end());
  }
  EXPECT_EQ(distinct.size(), 6u);
  EXPECT_EQ(map.range_lo, 0.0);
  EXPECT_EQ(map.range_hi, 2.0);

  Rng rng2(4);
  SoftLabelMap two = GenerateSoftLabelMap(2, 2, 0.0, 1.0, rng2);
  EXPECT_TRUE(SameOriginPairs(two.table).empty());
  EXPECT_THROW(GenerateSoftLabelMap(1, 1, rng), ContractError);
  EXPECT_THROW(GenerateSoftLabelMap(2, 0, rng), ContractError);
}

TEST(DecodeTest, RoundTripAndRobustness) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(DeriveSeed(seed, "decode"));
    const int c = 2 + static_cast<int>(seed % 6);
    const int nb = 1 + static_cast<int>((seed / 6) % 4);
    SoftLabelMap map = GenerateSoftLabelMap(c, nb, rng);
    std::vector<double> all;
    for (const auto& row : map.table) all.insert(all.end(), row.begin(), row.end());
    std::sort(all.begin(), all.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < all.size(); ++i) gap = std::min(gap, all[i] - all[i - 1]);
    const double reach = gap / 2.0 * (1.0 - 1e-9);
    for (int y = 0; y < c; ++y) {
      for (double v : map.table[y]) {
        ASSERT_EQ(DecodePrediction(v, map), y);
        ASSERT_EQ(DecodePrediction(v + rng.Uniform(-reach, reach), map), y);
        ASSERT_EQ(DecodePrediction(v + reach, map), y);
        ASSERT_EQ(DecodePrediction(v - reach, map), y);
      }
    }
  }
}

TEST(DecodeTest, Examples) {
  auto map = SoftLabelMap::FromTable({{0.2, 0.6, 0.8}, {0.3, 0.4, 0.9}}, 0.0, 1.0);
  EXPECT_EQ(DecodePrediction(0.55, map), 0);
  EXPECT_EQ(DecodePrediction(0.25, map), 0);
  EXPECT_EQ(DecodePrediction(0.35, map), 1);
  EXPECT_EQ(DecodePrediction(5.0, map), 1);
}

TEST(BinningTest, TwoBinDefault) {
  BinningRule rule;
  EXPECT_EQ(BinIndex(rule, 50, 100), 0);
  EXPECT_EQ(BinIndex(rule, 150, 150), 1);
  EXPECT_EQ(BinIndex(rule, 100, 100), 0);
  EXPECT_EQ(BinIndex(rule, 100, 101), 1);
  std::int64_t bin0 = 0;
  for (int a = 0; a <= 200; ++a)
    for (int b = 0; b <= 200; ++b) bin0 += BinIndex(rule, a, b) == 0;
  EXPECT_EQ(bin0, 20301);
  EXPECT_THROW(BinIndex(rule, 201, 0), ContractError);
  EXPECT_THROW(BinIndex(rule, 0, -1), ContractError);
  EXPECT_EQ(MakeBinningRule(200, 2).thresholds, std::vector<int>{201});
}

TEST(BinningTest, QuantileMasses) {
  for (int nb = 2; nb <= 4; ++nb) {
    BinningRule rule;
    rule.bin_count = nb;
    rule.thresholds = QuantileThresholds(200, nb);
    rule.Validate();
    std::vector<double> mass(nb, 0.0);
    for (int a = 0; a <= 200; ++a)
      for (int b = 0; b <= 200; ++b) mass[BinIndex(rule, a, b)] += 1.0 / 40401.0;
    for (double m : mass) EXPECT_LE(std::abs(m - 1.0 / nb), 0.01) << "N_b " << nb;
  }
  EXPECT_EQ(QuantileThresholds(200, 2), std::vector<int>{201});
  EXPECT_TRUE(QuantileThresholds(200, 1).empty());
  BinningRule one = MakeBinningRule(200, 1);
  EXPECT_EQ(BinIndex(one, 200, 200), 0);
  EXPECT_THROW(QuantileThresholds(3, 4), ContractError);
}

TEST(SoftTargetTest, Lookup) {
  auto map = SoftLabelMap::FromTable({{0.2, 0.6, 0.8}, {0.3, 0.4, 0.9}}, 0.0, 1.0);
  BinningRule rule = MakeBinningRule(200, 3);
  EXPECT_EQ(SoftTarget(0, 200, 200, map, rule), 0.8);
  EXPECT_EQ(SoftTarget(1, 0, 0, map, rule), 0.3);
  for (int y = 0; y < 2; ++y)
    for (int s = 0; s <= 200; s += 7)
      EXPECT_EQ(DecodePrediction(SoftTarget(y, s, 200 - s / 2, map, rule), map), y);
  EXPECT_THROW(SoftTarget(2, 0, 0, map, rule), ContractError);
  EXPECT_THROW(SoftTarget(0, 0, 0, map, BinningRule{}), ContractError);
}

TEST(SoftLabelDocumentTest, RoundTrip) {
  Rng rng(5);
  SoftLabelMap map = GenerateSoftLabelMap(4, 3, rng);
  BinningRule rule = MakeBinningRule(200, 3);
  auto [m2, r2] = ParseSoftLabelDocument(
      nlohmann::json::parse(SoftLabelDocument(map, rule).dump()));
  EXPECT_EQ(m2.table, map.table);
  EXPECT_EQ(m2.range_lo, map.range_lo);
  EXPECT_EQ(m2.range_hi, map.range_hi);
  EXPECT_EQ(r2.thresholds, rule.thresholds);
  EXPECT_EQ(r2.bin_count, 3);
  EXPECT_THROW(ParseSoftLabelDocument(nlohmann::json::parse(R"({"classes": {}})")),
               ConfigError);
}

TEST(DiscorlossTest, ZeroLambdaIsCrossEntropy) {
  Rng rng(6);
  Tensor2 logits(8, 3), upload(8, 4);
  for (double& v : logits.values()) v = rng.Normal();
  for (double& v : upload.values()) v = rng.Normal();
  std::vector<int> y{0, 1, 2, 0, 1, 2, 0, 1};
  Tape a;
  double ce = a.value(SoftmaxCrossEntropy(a, a.Leaf(logits), y)).item();
  Tape b;
  double total = b.value(DiscorlossTotal(b, b.Leaf(logits), b.Leaf(upload), y, 3,
                                         DiscorlossConfig{0.0}))
                     .item();
  EXPECT_EQ(ce, total);
  for (double lambda : {0.08, 0.5, 3.0}) {
    Tape c;
    double t = c.value(DiscorlossTotal(c, c.Leaf(logits), c.Leaf(upload), y, 3,
                                       DiscorlossConfig{lambda}))
                   .item();
    EXPECT_GE(t, ce - 1e-12);
  }
}

TEST(DiscorlossTest, Errors) {
  Tape t;
  std::vector<int> one{0};
  EXPECT_THROW(DiscorlossTotal(t, t.Leaf(Tensor2(1, 2)), t.Leaf(Tensor2(1, 2)), one, 2,
                               DiscorlossConfig{}),
               ContractError);
  EXPECT_THROW(DiscorlossObjective(DiscorlossConfig{-0.1}), ContractError);
}

TEST(DiscorlossTest, PenaltyLowersUploadDependence) {
  BlobParams bp;
  bp.n_per_class = 300;
  Rng data_rng(7);
  PartyData data = MakePartyData(SynthBlobs(bp, data_rng), false);
  auto dcor_after = [&](double lambda) {
    Rng rng(8);
    SplitModel m = MakeSplitModel(10, 10, 2, SplitArchitecture{}, rng);
    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.optimizer = OptimizerKind::kAdam;
    cfg.learning_rate = 1e-2;
    TrainDiscorloss(m, data, nullptr, DiscorlossConfig{lambda}, cfg);
    Tensor2 up = MlpEval(m.client_spec, m.client, data.client.features);
    return DistanceCorrelation(up, OneHot(data.host.labels, 2));
  };
  EXPECT_LT(dcor_after(1.0), dcor_after(0.0));
}

TEST(DishonestTest, Reports) {
  std::vector<int> rand{5, 9, 0, 200};
  std::vector<std::size_t> id{0, 1, 2, 3};
  EXPECT_EQ(DishonestReport(rand, id), rand);
  std::vector<std::size_t> rev{3, 2, 1, 0};
  EXPECT_EQ(DishonestReport(rand, rev), (std::vector<int>{200, 0, 9, 5}));
  Rng rng(9);
  EXPECT_EQ(DishonestReport(rand, DishonestMode::kConstant, rng), std::vector<int>(4, 0));
  auto shuffled = DishonestReport(rand, DishonestMode::kShuffle, rng);
  std::sort(shuffled.begin(), shuffled.end());
  EXPECT_EQ(shuffled, (std::vector<int>{0, 5, 9, 200}));
  EXPECT_EQ(ParseDishonestMode("shuffle"), DishonestMode::kShuffle);
  EXPECT_THROW(ParseDishonestMode("lie"), ConfigError);
}

class LabObfTrainingTest : public ::testing::Test {
 protected:
  static std::pair<PartyData, PartyData> Data(std::uint64_t seed) {
    BlobParams bp;
    bp.n_per_class = 2000;
    Rng rng(seed);
    VerticalDataset ds = SynthBlobs(bp, rng);
    ds = AddRandomAttributes(ds, 200, rng);
    DatasetSplits s = SplitTrainValidation(ds, 0.2, rng);
    return {MakePartyData(s.train, true), MakePartyData(s.validation, true)};
  }
  static TrainConfig Config(int epochs) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.loss_mode = LossMode::kMseSoft;
    cfg.optimizer = OptimizerKind::kAdam;
    cfg.learning_rate = 1e-2;
    return cfg;
  }
};

TEST_F(LabObfTrainingTest, LearnsBlobs) {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto [train, val] = Data(seed);
    Rng rng(100 + seed);
    SoftLabelMap map = GenerateSoftLabelMap(2, 2, rng);
    SplitModel m = MakeSplitModel(11, 11, 1, SplitArchitecture{}, rng);
    TrainConfig cfg = Config(60);
    cfg.seed = seed;
    TrainHistory h = TrainLabObf(m, train, &val, map, MakeBinningRule(200, 2), cfg);
    total += h.validation_accuracy.back();
  }
  EXPECT_GE(total / 5.0, 0.85);
}

TEST_F(LabObfTrainingTest, SingleBinTracksPlainTraining) {
  auto [train, val] = Data(11);
  auto map = SoftLabelMap::FromTable({{0.0}, {1.0}}, 0.0, 1.0);
  Rng rng(12);
  SplitModel m = MakeSplitModel(11, 11, 1, SplitArchitecture{}, rng);
  TrainLabObf(m, train, nullptr, map, MakeBinningRule(200, 1), Config(20));
  const double soft = EvaluateAccuracy(m, val, LabObfObjective(map, MakeBinningRule(200, 1)));

  Rng rng2(12);
  SplitModel plain = MakeSplitModel(11, 11, 2, SplitArchitecture{}, rng2);
  TrainConfig cfg = Config(20);
  cfg.loss_mode = LossMode::kCrossEntropy;
  TrainPlain(plain, train, nullptr, cfg);
  EXPECT_NEAR(soft, EvaluateAccuracy(plain, val, CrossEntropyObjective()), 0.03);
}

TEST_F(LabObfTrainingTest, UntrainedDecodeIsNearChance) {
  auto [train, val] = Data(13);
  Rng rng(14);
  SoftLabelMap map = GenerateSoftLabelMap(2, 2, rng);
  SplitModel m = MakeSplitModel(11, 11, 1, SplitArchitecture{}, rng);
  TrainHistory h = TrainLabObf(m, train, &val, map, MakeBinningRule(200, 2), Config(0));
  EXPECT_TRUE(h.validation_accuracy.empty());
  double acc = EvaluateAccuracy(m, val, LabObfObjective(map, MakeBinningRule(200, 2)));
  EXPECT_NEAR(acc, 0.5, 0.15);
}

TEST_F(LabObfTrainingTest, IdentityShuffleChangesNothing) {
  auto [train, val] = Data(15);
  Rng rng(16);
  SoftLabelMap map = GenerateSoftLabelMap(2, 2, rng);
  SplitModel a = MakeSplitModel(11, 11, 1, SplitArchitecture{}, rng);
  SplitModel b = a;
  std::vector<std::size_t> id(train.size());
  std::iota(id.begin(), id.end(), 0);
  std::vector<int> reported = DishonestReport(train.client.rand, id);
  TrainLabObf(a, train, nullptr, map, MakeBinningRule(200, 2), Config(2));
  TrainLabObf(b, train, nullptr, map, MakeBinningRule(200, 2), Config(2), &reported);
  EXPECT_EQ(a, b);
}

TEST_F(LabObfTrainingTest, Preconditions) {
  auto [train, val] = Data(17);
  Rng rng(18);
  SoftLabelMap map = GenerateSoftLabelMap(2, 2, rng);
  SplitModel m = MakeSplitModel(11, 11, 1, SplitArchitecture{}, rng);
  TrainConfig ce = Config(1);
  ce.loss_mode = LossMode::kCrossEntropy;
  EXPECT_THROW(TrainLabObf(m, train, nullptr, map, MakeBinningRule(200, 2), ce),
               ContractError);
  PartyData bare = train;
  bare.client.rand.clear();
  EXPECT_THROW(TrainLabObf(m, bare, nullptr, map, MakeBinningRule(200, 2), Config(1)),
               ContractError);
  EXPECT_THROW(LabObfObjective(map, MakeBinningRule(200, 3)), ContractError);
  SplitModel wide = MakeSplitModel(11, 11, 2, SplitArchitecture{}, rng);
  EXPECT_THROW(TrainLabObf(wide, train, nullptr, map, MakeBinningRule(200, 2), Config(1)),
               ContractError);
}

}  // namespace
}  // namespace vflsim
