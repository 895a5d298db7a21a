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

// Host-side defenses: the distance-correlation regularizer (Discorloss) and
// label obfuscation with secret soft labels (LabObf).

#ifndef VFLSIM_DEFENSE_HPP_
#define VFLSIM_DEFENSE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vflsim/dataflow.hpp"
#include "vflsim/errors.hpp"
#include "vflsim/ndcore/rng.hpp"
#include "vflsim/ndcore/tape.hpp"
#include "vflsim/splitnn.hpp"
#include "vflsim/stats.hpp"

namespace vflsim {

// ---------------------------------------------------------------------------
// Soft-label maps

// Each class y owns bins_per_class soft values table[y][0..N_b-1], all inside
// [range_lo, range_hi].
struct SoftLabelMap {
  int class_count = 0;
  int bins_per_class = 0;
  std::vector<std::vector<double>> table;
  double range_lo = 0.0;
  double range_hi = 1.0;

  double range_width() const { return range_hi - range_lo; }
  std::size_t value_count() const {
    return static_cast<std::size_t>(class_count) * bins_per_class;
  }

  static SoftLabelMap FromTable(std::vector<std::vector<double>> table, double lo,
                                double hi) {
    SoftLabelMap m;
    m.class_count = static_cast<int>(table.size());
    m.bins_per_class = table.empty() ? 0 : static_cast<int>(table.front().size());
    m.table = std::move(table);
    m.range_lo = lo;
    m.range_hi = hi;
    m.CheckShape();
    return m;
  }

  // Structural checks only; the placement rules live in the validator.
  void CheckShape() const {
    if (class_count < 1 || bins_per_class < 1) {
      throw ContractError("SoftLabelMap: needs at least one class and one bin");
    }
    if (table.size() != static_cast<std::size_t>(class_count)) {
      throw ContractError("SoftLabelMap: table has " + std::to_string(table.size()) +
                          " classes, expected " + std::to_string(class_count));
    }
    for (const auto& row : table) {
      if (row.size() != static_cast<std::size_t>(bins_per_class)) {
        throw ContractError("SoftLabelMap: every class needs " +
                            std::to_string(bins_per_class) + " soft values");
      }
      for (double v : row) {
        if (!std::isfinite(v)) throw ContractError("SoftLabelMap: non-finite value");
      }
    }
    if (!(range_hi >= range_lo)) throw ContractError("SoftLabelMap: empty soft range");
  }

  const std::vector<double>& operator[](int y) const { return table.at(y); }
};

enum class ViolationKind { kIntervalTooSmall, kSameOriginAdjacent, kValueOutOfRange };
enum class Severity { kWarning, kError };

inline const char* ViolationName(ViolationKind k) {
  switch (k) {
    case ViolationKind::kIntervalTooSmall: return "interval_too_small";
    case ViolationKind::kSameOriginAdjacent: return "same_origin_adjacent";
    case ViolationKind::kValueOutOfRange: return "value_out_of_range";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::vector<double> values;
  Severity severity = Severity::kWarning;

  std::string ToString() const {
    std::string s = ViolationName(kind);
    s += " at (";
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) s += ", ";
      s += fmt::format("{}", values[i]);
    }
    return s + ")";
  }
};

// Scans the sorted soft values for gaps below |R'|/(2N), neighbours with the
// same origin class, and values outside R'. Never throws on placement
// problems; `strict` only raises the severity.
inline std::vector<Violation> ValidateSoftLabelMap(const SoftLabelMap& map,
                                                   bool strict = false) {
  map.CheckShape();
  const Severity severity = strict ? Severity::kError : Severity::kWarning;
  std::vector<std::pair<double, int>> entries;
  for (int y = 0; y < map.class_count; ++y)
    for (double v : map.table[y]) entries.emplace_back(v, y);
  std::sort(entries.begin(), entries.end());

  std::vector<Violation> out;
  const double min_gap = map.range_width() / (2.0 * static_cast<double>(entries.size()));
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    const auto& [a, ya] = entries[i];
    const auto& [b, yb] = entries[i + 1];
    if (std::abs(b - a) < min_gap) {
      out.push_back({ViolationKind::kIntervalTooSmall, {a, b}, severity});
    }
    if (ya == yb) out.push_back({ViolationKind::kSameOriginAdjacent, {a, b}, severity});
  }
  for (const auto& [v, y] : entries) {
    if (v < map.range_lo || v > map.range_hi) {
      out.push_back({ViolationKind::kValueOutOfRange, {v}, severity});
    }
  }
  return out;
}

// Lays N = C*N_b evenly spaced slots over [lo, hi], assigns classes by a
// shuffled round-robin with no repeated neighbour, then jitters each value
// by at most |R'|/(4N) inside the range.
inline SoftLabelMap GenerateSoftLabelMap(int class_count, int bins_per_class, double lo,
                                         double hi, Rng& rng) {
  if (class_count < 2 || bins_per_class < 1) {
    throw ContractError("GenerateSoftLabelMap: needs C >= 2 and N_b >= 1 (got C=" +
                        std::to_string(class_count) +
                        ", N_b=" + std::to_string(bins_per_class) + ")");
  }
  if (!(hi > lo)) throw ContractError("GenerateSoftLabelMap: soft range must be non-empty");
  const int n = class_count * bins_per_class;
  const double width = hi - lo;

  std::vector<int> origin;
  origin.reserve(n);
  std::vector<int> round(class_count);
  for (int r = 0; r < bins_per_class; ++r) {
    std::iota(round.begin(), round.end(), 0);
    rng.Shuffle(std::span<int>(round));
    if (!origin.empty() && round.front() == origin.back()) {
      std::swap(round[0], round[1 + rng.Below(class_count - 1)]);
    }
    origin.insert(origin.end(), round.begin(), round.end());
  }

  const double spacing = width / static_cast<double>(n - 1);
  const double jitter = width / (4.0 * n);
  SoftLabelMap map;
  map.class_count = class_count;
  map.bins_per_class = bins_per_class;
  map.range_lo = lo;
  map.range_hi = hi;
  map.table.assign(class_count, {});
  for (int i = 0; i < n; ++i) {
    double v = lo + spacing * i + rng.Uniform(-jitter, jitter);
    map.table[origin[i]].push_back(std::clamp(v, lo, hi));
  }
  return map;
}

// Default soft range [0, C-1], matching the original label range.
inline SoftLabelMap GenerateSoftLabelMap(int class_count, int bins_per_class, Rng& rng) {
  return GenerateSoftLabelMap(class_count, bins_per_class, 0.0,
                              static_cast<double>(class_count - 1), rng);
}

// ---------------------------------------------------------------------------
// Two-attribute binning

// Sums r_c + r_h in [0, 2M] are cut by ascending thresholds; a sum s lands in
// bin #{t : t <= s}, so each threshold is the first sum of the next bin.
struct BinningRule {
  int attribute_max = 200;
  int bin_count = 2;
  std::vector<int> thresholds{201};

  void Validate() const {
    if (attribute_max < 1) throw ContractError("BinningRule: attribute_max must be >= 1");
    if (bin_count < 1) throw ContractError("BinningRule: bin_count must be >= 1");
    if (thresholds.size() != static_cast<std::size_t>(bin_count - 1)) {
      throw ContractError("BinningRule: " + std::to_string(bin_count) + " bins need " +
                          std::to_string(bin_count - 1) + " thresholds");
    }
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
      if (thresholds[i] <= 0 || thresholds[i] > 2 * attribute_max ||
          (i > 0 && thresholds[i] <= thresholds[i - 1])) {
        throw ContractError("BinningRule: thresholds must ascend strictly inside (0, 2M]");
      }
    }
  }
};

inline int BinIndex(const BinningRule& rule, int r_c, int r_h) {
  if (r_c < 0 || r_c > rule.attribute_max || r_h < 0 || r_h > rule.attribute_max) {
    throw ContractError("BinIndex: attributes (" + std::to_string(r_c) + ", " +
                        std::to_string(r_h) + ") outside [0, " +
                        std::to_string(rule.attribute_max) + "]");
  }
  const int s = r_c + r_h;
  return static_cast<int>(
      std::upper_bound(rule.thresholds.begin(), rule.thresholds.end(), s) -
      rule.thresholds.begin());
}

// Thresholds whose bins have masses as close to 1/N_b as possible under the
// triangular law of r_c + r_h (both uniform on {0..M}). Works in integer
// counts: bin weights W_b out of (M+1)^2, minimizing max |N_b*W_b - (M+1)^2|.
// Among optimal cuts the lexicographically largest threshold list wins.
inline std::vector<int> QuantileThresholds(int attribute_max, int bin_count) {
  if (bin_count < 1) throw ContractError("QuantileThresholds: bin_count must be >= 1");
  if (bin_count > attribute_max) {
    throw ContractError("QuantileThresholds: bin_count " + std::to_string(bin_count) +
                        " exceeds attribute_max " + std::to_string(attribute_max));
  }
  if (bin_count == 1) return {};
  const int m = attribute_max;
  const int sums = 2 * m + 1;
  const std::int64_t total = static_cast<std::int64_t>(m + 1) * (m + 1);
  const std::int64_t nb = bin_count;
  std::vector<std::int64_t> prefix(sums + 1, 0);
  for (int s = 0; s < sums; ++s) prefix[s + 1] = prefix[s] + (m + 1 - std::abs(s - m));

  // finish[k][i]: sums i..2M can be split into k bins within deviation d.
  auto table_for = [&](std::int64_t d) {
    std::vector<std::vector<char>> finish(bin_count + 1,
                                          std::vector<char>(sums + 1, 0));
    finish[0][sums] = 1;
    for (int k = 1; k <= bin_count; ++k) {
      for (int i = 0; i < sums; ++i) {
        for (int j = i + 1; j <= sums; ++j) {
          if (!finish[k - 1][j]) continue;
          if (std::llabs(nb * (prefix[j] - prefix[i]) - total) <= d) {
            finish[k][i] = 1;
            break;
          }
        }
      }
    }
    return finish;
  };

  std::int64_t lo = 0, hi = nb * total;
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (table_for(mid)[bin_count][0]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  auto finish = table_for(lo);
  std::vector<int> thresholds;
  int start = 0;
  for (int k = bin_count; k > 1; --k) {
    for (int j = sums - 1; j > start; --j) {
      if (finish[k - 1][j] &&
          std::llabs(nb * (prefix[j] - prefix[start]) - total) <= lo) {
        thresholds.push_back(j);
        start = j;
        break;
      }
    }
  }
  return thresholds;
}

inline BinningRule MakeBinningRule(int attribute_max, int bin_count) {
  BinningRule rule;
  rule.attribute_max = attribute_max;
  rule.bin_count = bin_count;
  if (bin_count == 2 && attribute_max == 200) {
    rule.thresholds = {201};
  } else {
    rule.thresholds = QuantileThresholds(attribute_max, bin_count);
  }
  rule.Validate();
  return rule;
}

inline double SoftTarget(int y, int r_c, int r_h, const SoftLabelMap& map,
                         const BinningRule& rule) {
  if (y < 0 || y >= map.class_count) {
    throw ContractError("SoftTarget: class " + std::to_string(y) + " outside [0, " +
                        std::to_string(map.class_count) + ")");
  }
  if (rule.bin_count != map.bins_per_class) {
    throw ContractError("SoftTarget: rule has " + std::to_string(rule.bin_count) +
                        " bins, map has " + std::to_string(map.bins_per_class));
  }
  return map.table[y][BinIndex(rule, r_c, r_h)];
}

// Nearest soft value wins; scanning class-major then bin-major with a strict
// comparison sends ties to the earliest entry.
inline int DecodePrediction(double y_hat, const SoftLabelMap& map) {
  int best = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  for (int y = 0; y < map.class_count; ++y) {
    for (double v : map.table[y]) {
      double d = std::abs(y_hat - v);
      if (d < best_distance) {
        best_distance = d;
        best = y;
      }
    }
  }
  return best;
}

// Host-private document: soft-label table, soft range and binning rule.
inline nlohmann::json SoftLabelDocument(const SoftLabelMap& map, const BinningRule& rule) {
  nlohmann::json classes = nlohmann::json::object();
  for (int y = 0; y < map.class_count; ++y) classes[std::to_string(y)] = map.table[y];
  return {{"schema_version", 1},
          {"classes", classes},
          {"soft_range", {map.range_lo, map.range_hi}},
          {"attribute_max", rule.attribute_max},
          {"thresholds", rule.thresholds}};
}

inline std::pair<SoftLabelMap, BinningRule> ParseSoftLabelDocument(const nlohmann::json& j) {
  try {
    const auto& classes = j.at("classes");
    std::vector<std::vector<double>> table(classes.size());
    for (auto it = classes.begin(); it != classes.end(); ++it) {
      std::size_t y = std::stoul(it.key());
      if (y >= table.size()) throw ConfigError("soft-label document: class keys must be 0..C-1");
      table[y] = it.value().get<std::vector<double>>();
    }
    auto range = j.at("soft_range").get<std::vector<double>>();
    if (range.size() != 2) throw ConfigError("soft-label document: soft_range needs 2 values");
    SoftLabelMap map = SoftLabelMap::FromTable(std::move(table), range[0], range[1]);
    BinningRule rule;
    rule.attribute_max = j.at("attribute_max").get<int>();
    rule.thresholds = j.at("thresholds").get<std::vector<int>>();
    rule.bin_count = static_cast<int>(rule.thresholds.size()) + 1;
    rule.Validate();
    return {std::move(map), std::move(rule)};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("soft-label document: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("soft-label document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// LabObf training

// Regresses the scalar top-model output onto the secret soft target of each
// row. The client only ever sees gradients of this loss.
class LabObfObjective : public HostObjective {
 public:
  LabObfObjective(SoftLabelMap map, BinningRule rule)
      : map_(std::move(map)), rule_(std::move(rule)) {
    map_.CheckShape();
    rule_.Validate();
    if (rule_.bin_count != map_.bins_per_class) {
      throw ContractError("LabObf: binning rule and soft-label map disagree on N_b");
    }
  }

  std::size_t OutputWidth(int class_count) const override {
    if (class_count != map_.class_count) {
      throw ContractError("LabObf: map covers " + std::to_string(map_.class_count) +
                          " classes, data has " + std::to_string(class_count));
    }
    return 1;
  }

  ValueId Loss(Tape& tape, ValueId prediction, ValueId /*client_upload*/,
               const HostBatch& batch) const override {
    const HostView& view = *batch.view;
    if (view.rand.empty() || batch.reported_client_rand.size() != batch.rows.size()) {
      throw ContractError("LabObf: both parties' random attributes are required");
    }
    Tensor2 target(batch.rows.size(), 1);
    for (std::size_t i = 0; i < batch.rows.size(); ++i) {
      std::size_t r = batch.rows[i];
      target(i, 0) = SoftTarget(view.labels[r], batch.reported_client_rand[i],
                                view.rand[r], map_, rule_);
    }
    return Mse(tape, prediction, target);
  }

  int Decode(std::span<const double> row) const override {
    return DecodePrediction(row[0], map_);
  }

  const SoftLabelMap& map() const { return map_; }
  const BinningRule& rule() const { return rule_; }

 private:
  SoftLabelMap map_;
  BinningRule rule_;
};

inline TrainHistory TrainLabObf(SplitModel& model, const PartyData& train,
                                const PartyData* validation, const SoftLabelMap& map,
                                const BinningRule& rule, const TrainConfig& cfg,
                                const std::vector<int>* reported_client_rand = nullptr) {
  if (cfg.loss_mode != LossMode::kMseSoft) {
    throw ContractError("TrainLabObf: loss mode must be mse_soft");
  }
  if (train.client.rand.empty() || train.host.rand.empty()) {
    throw ContractError("TrainLabObf: dataset lacks the random attribute columns");
  }
  LabObfObjective objective(map, rule);
  return TrainSplit(model, train, validation, cfg, objective, nullptr,
                    reported_client_rand);
}

// ---------------------------------------------------------------------------
// Dishonest client

enum class DishonestMode { kShuffle, kConstant };

inline DishonestMode ParseDishonestMode(const std::string& s) {
  if (s == "shuffle") return DishonestMode::kShuffle;
  if (s == "constant") return DishonestMode::kConstant;
  throw ConfigError("unknown dishonest mode '" + s + "' (expected shuffle|constant)");
}

// Reports rand[perm[i]] for row i.
inline std::vector<int> DishonestReport(const std::vector<int>& rand,
                                        std::span<const std::size_t> permutation) {
  if (permutation.size() != rand.size()) {
    throw ContractError("DishonestReport: permutation length mismatch");
  }
  std::vector<int> out(rand.size());
  for (std::size_t i = 0; i < rand.size(); ++i) out[i] = rand.at(permutation[i]);
  return out;
}

inline std::vector<int> DishonestReport(const std::vector<int>& rand, DishonestMode mode,
                                        Rng& rng) {
  if (mode == DishonestMode::kConstant) return std::vector<int>(rand.size(), 0);
  std::vector<std::size_t> perm(rand.size());
  std::iota(perm.begin(), perm.end(), 0);
  rng.Shuffle(std::span<std::size_t>(perm));
  return DishonestReport(rand, perm);
}

// ---------------------------------------------------------------------------
// Discorloss

struct DiscorlossConfig {
  double lambda = 0.08;

  void Validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw ContractError("Discorloss: lambda must be a finite value >= 0");
    }
  }
};

// Cross-entropy plus lambda * dCor(upload, one-hot labels). The penalty sees
// exactly the tensor the client uploaded, extension columns included.
inline ValueId DiscorlossTotal(Tape& tape, ValueId logits, ValueId client_upload,
                               std::span<const int> labels, int class_count,
                               const DiscorlossConfig& cfg) {
  cfg.Validate();
  if (labels.size() < 2) throw ContractError("Discorloss: batch must hold >= 2 rows");
  ValueId ce = SoftmaxCrossEntropy(tape, logits, labels);
  if (cfg.lambda == 0.0) return ce;
  ValueId y = tape.Leaf(OneHot(labels, class_count));
  ValueId dcor = DistanceCorrelation(tape, client_upload, y);
  return Add(tape, ce, Scale(tape, dcor, cfg.lambda));
}

class DiscorlossObjective : public CrossEntropyObjective {
 public:
  explicit DiscorlossObjective(DiscorlossConfig cfg) : cfg_(cfg) { cfg_.Validate(); }

  std::size_t MinBatchSize() const override { return 2; }

  ValueId Loss(Tape& tape, ValueId prediction, ValueId client_upload,
               const HostBatch& batch) const override {
    std::vector<int> y = GatherLabels(batch.view->labels, batch.rows);
    return DiscorlossTotal(tape, prediction, client_upload, y, batch.view->class_count,
                           cfg_);
  }

  const DiscorlossConfig& config() const { return cfg_; }

 private:
  DiscorlossConfig cfg_;
};

inline TrainHistory TrainDiscorloss(SplitModel& model, const PartyData& train,
                                    const PartyData* validation,
                                    const DiscorlossConfig& dcfg, const TrainConfig& cfg,
                                    UploadTransform* transform = nullptr) {
  if (cfg.loss_mode != LossMode::kCrossEntropy) {
    throw ContractError("TrainDiscorloss: loss mode must be cross_entropy");
  }
  DiscorlossObjective objective(dcfg);
  return TrainSplit(model, train, validation, cfg, objective, transform);
}

}  // namespace vflsim

#endif  // VFLSIM_DEFENSE_HPP_
