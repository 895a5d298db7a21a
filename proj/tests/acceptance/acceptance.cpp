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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include "oracles/oracles.hpp"
#include "support/primitive_cases.hpp"
#include "vflsim/attack.hpp"
#include "vflsim/dataflow.hpp"
#include "vflsim/defense.hpp"
#include "vflsim/harness/config.hpp"
#include "vflsim/harness/runner.hpp"
#include "vflsim/ndcore/grad_check.hpp"
#include "vflsim/splitnn.hpp"
#include "vflsim/stats.hpp"

namespace {

using namespace vflsim;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

oracle::Matrix ToMatrix(const Tensor2& t) {
  oracle::Matrix m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  return m;
}

Tensor2 Random(std::size_t r, std::size_t c, Rng& rng) {
  Tensor2 t(r, c);
  for (double& v : t.values()) v = rng.Normal();
  return t;
}

// ---------------------------------------------------------------------------

Outcome DcorOracle() {
  Stopwatch clock;
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.Below(63);
    const std::size_t p = 1 + rng.Below(5);
    const std::size_t q = 1 + rng.Below(5);
    Tensor2 x = Random(n, p, rng);
    Tensor2 y = Random(n, q, rng);
    // Mix in some dependence so values span the range.
    const double mix = rng.Uniform();
    for (std::size_t i = 0; i < n; ++i) y(i, 0) = mix * x(i, 0) + (1 - mix) * y(i, 0);
    worst = std::max(worst, std::abs(DistanceCorrelation(x, y) -
                                     oracle::DistanceCorrelation(ToMatrix(x), ToMatrix(y))));
  }
  const double secs = clock.Seconds();
  return {worst <= 1e-9 && secs < 5.0,
          fmt::format("max |diff| {:.3g} over 50 pairs, {:.2f}s", worst, secs)};
}

Outcome GradientCorrectness() {
  Stopwatch clock;
  double worst = 0.0;
  std::string worst_name;
  for (const auto& c : testing_support::PrimitiveCases()) {
    double err = GradCheck(c.program, c.point, 1e-6);
    if (err > worst) {
      worst = err;
      worst_name = c.name;
    }
  }
  Rng rng(102);
  Tensor2 x = Random(16, 4, rng);
  Tensor2 y = Random(16, 3, rng);
  double dcor_err = GradCheck(
      [&](Tape& t, ValueId v) { return DistanceCorrelation(t, v, t.Leaf(y)); }, x, 1e-6);
  const double secs = clock.Seconds();
  return {worst < 1e-5 && dcor_err < 1e-5 && secs < 10.0,
          fmt::format("worst primitive {} {:.3g}, dCor composite {:.3g}, {:.2f}s", worst_name,
                      worst, dcor_err, secs)};
}

Outcome SplitMonolithEquivalence() {
  Rng rng(103);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dc = 1 + rng.Below(6), dh = 1 + rng.Below(6);
    const std::size_t classes = 2 + rng.Below(3);
    const std::size_t depth = rng.Below(3);
    SplitArchitecture arch;
    arch.client_hidden.clear();
    arch.host_hidden.clear();
    for (std::size_t k = 0; k < depth; ++k) {
      arch.client_hidden.push_back(2 + rng.Below(7));
      arch.host_hidden.push_back(2 + rng.Below(7));
    }
    arch.top_hidden = {2 + rng.Below(7)};
    arch.cut_dim = 1 + rng.Below(6);
    SplitModel m = MakeSplitModel(dc, dh, classes, arch, rng);
    const std::size_t n = 4 + rng.Below(20);
    PartyData data;
    data.client.features = Random(n, dc, rng);
    data.host.features = Random(n, dh, rng);
    for (std::size_t i = 0; i < n; ++i) {
      data.host.labels.push_back(static_cast<int>(rng.Below(classes)));
    }
    data.host.class_count = static_cast<int>(classes);

    oracle::Network net;
    for (std::size_t k = 0; k <= depth; ++k) {
      oracle::Layer l;
      l.w = oracle::BlockDiagonal(ToMatrix(m.client.layers[k].weight),
                                  ToMatrix(m.host.layers[k].weight));
      for (const Tensor2* b : {&m.client.layers[k].bias, &m.host.layers[k].bias}) {
        l.b.insert(l.b.end(), b->values().begin(), b->values().end());
      }
      l.relu = k < depth;
      net.layers.push_back(l);
    }
    for (std::size_t k = 0; k < m.top.layers.size(); ++k) {
      const auto& layer = m.top.layers[k];
      net.layers.push_back({ToMatrix(layer.weight),
                            {layer.bias.values().begin(), layer.bias.values().end()},
                            k + 1 < m.top.layers.size()});
    }
    oracle::Matrix joined = ToMatrix(ConcatColumns(data.client.features, data.host.features));
    oracle::Matrix expected = net.Forward(joined).output;
    Tensor2 got = JointForward(m, data.client.features, data.host.features);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < classes; ++c)
        worst = std::max(worst, std::abs(got(r, c) - expected[r][c]));

    // Bottom gradients through the two-party protocol: one full-batch SGD
    // step at lr 1 moves each weight by exactly minus its gradient.
    auto grads = net.Gradients(joined, data.host.labels);
    SplitModel before = m;
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = std::max<std::size_t>(n, 2);
    cfg.learning_rate = 1.0;
    TrainPlain(m, data, nullptr, cfg);
    for (std::size_t k = 0; k <= depth; ++k) {
      const Tensor2& cw = before.client.layers[k].weight;
      for (std::size_t i = 0; i < cw.rows(); ++i)
        for (std::size_t o = 0; o < cw.cols(); ++o)
          worst = std::max(worst, std::abs(cw(i, o) - m.client.layers[k].weight(i, o) -
                                           grads[k].w[i][o]));
      const Tensor2& hw = before.host.layers[k].weight;
      for (std::size_t i = 0; i < hw.rows(); ++i)
        for (std::size_t o = 0; o < hw.cols(); ++o)
          worst = std::max(worst, std::abs(hw(i, o) - m.host.layers[k].weight(i, o) -
                                           grads[k].w[cw.rows() + i][cw.cols() + o]));
      for (std::size_t o = 0; o < cw.cols(); ++o)
        worst = std::max(worst, std::abs(before.client.layers[k].bias(0, o) -
                                         m.client.layers[k].bias(0, o) - grads[k].b[o]));
      for (std::size_t o = 0; o < hw.cols(); ++o)
        worst = std::max(worst, std::abs(before.host.layers[k].bias(0, o) -
                                         m.host.layers[k].bias(0, o) -
                                         grads[k].b[cw.cols() + o]));
    }
  }
  return {worst <= 1e-10, fmt::format("max |diff| {:.3g} over 20 weight settings", worst)};
}

Outcome DecodeRoundTrip() {
  std::size_t checks = 0, misses = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(DeriveSeed(104, seed));
    const int c = 2 + static_cast<int>(rng.Below(6));
    const int nb = 1 + static_cast<int>(rng.Below(4));
    SoftLabelMap map = GenerateSoftLabelMap(c, nb, rng);
    std::vector<double> all;
    for (const auto& row : map.table) all.insert(all.end(), row.begin(), row.end());
    std::sort(all.begin(), all.end());
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < all.size(); ++i) gap = std::min(gap, all[i] - all[i - 1]);
    const double reach = gap / 2.0 * (1.0 - 1e-9);
    for (int y = 0; y < c; ++y) {
      for (double v : map.table[y]) {
        for (double probe : {v, v + reach, v - reach, v + rng.Uniform(-reach, reach)}) {
          ++checks;
          misses += DecodePrediction(probe, map) != y;
        }
      }
    }
  }
  return {misses == 0, fmt::format("{} of {} decodes wrong over 1000 maps", misses, checks)};
}

Outcome ValidatorFidelity() {
  auto pairs = [](const std::vector<Violation>& vs) {
    std::vector<std::vector<double>> out;
    for (const auto& v : vs)
      if (v.kind == ViolationKind::kSameOriginAdjacent) out.push_back(v.values);
    return out;
  };
  // Sort-and-scan oracle.
  auto oracle_pairs = [](const std::vector<std::vector<double>>& t) {
    std::vector<std::pair<double, int>> v;
    for (int y = 0; y < static_cast<int>(t.size()); ++y)
      for (double x : t[y]) v.push_back({x, y});
    std::sort(v.begin(), v.end());
    std::vector<std::vector<double>> out;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i - 1].second == v[i].second) out.push_back({v[i - 1].first, v[i].first});
    return out;
  };
  std::vector<std::vector<double>> degenerate{{0.0, 0.4}, {0.6, 1.0}};
  auto dv = ValidateSoftLabelMap(SoftLabelMap::FromTable(degenerate, 0.0, 1.0));
  const bool degenerate_ok = !pairs(dv).empty() && pairs(dv) == oracle_pairs(degenerate);

  std::vector<std::vector<double>> illustration{{0.2, 0.6, 0.8}, {0.3, 0.4, 0.9}};
  auto iv = ValidateSoftLabelMap(SoftLabelMap::FromTable(illustration, 0.0, 1.0));
  const bool illustration_ok = iv.size() == 2 && pairs(iv) == oracle_pairs(illustration);

  std::size_t dirty = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(DeriveSeed(105, seed));
    const int c = 2 + static_cast<int>(rng.Below(6));
    const int nb = 1 + static_cast<int>(rng.Below(4));
    dirty += !ValidateSoftLabelMap(GenerateSoftLabelMap(c, nb, rng)).empty();
  }
  return {degenerate_ok && illustration_ok && dirty == 0,
          fmt::format("degenerate map {} violations, illustration {} violations, "
                      "{} of 1000 generated maps flagged",
                      dv.size(), iv.size(), dirty)};
}

Outcome BinningMass() {
  BinningRule two;
  std::int64_t bin0 = 0;
  for (int a = 0; a <= 200; ++a)
    for (int b = 0; b <= 200; ++b) bin0 += BinIndex(two, a, b) == 0;
  double worst = 0.0;
  for (int nb = 2; nb <= 4; ++nb) {
    BinningRule rule;
    rule.bin_count = nb;
    rule.thresholds = QuantileThresholds(200, nb);
    std::vector<std::int64_t> count(nb, 0);
    for (int a = 0; a <= 200; ++a)
      for (int b = 0; b <= 200; ++b) ++count[BinIndex(rule, a, b)];
    for (auto k : count) worst = std::max(worst, std::abs(k / 40401.0 - 1.0 / nb));
  }
  return {bin0 == 20301 && worst <= 0.01,
          fmt::format("two-bin mass {}/40401, quantile max deviation {:.4f}", bin0, worst)};
}

// ---------------------------------------------------------------------------
// End-to-end criteria share experiment runs.

struct Runs {
  fs::path config_dir;
  fs::path out_dir;

  harness::RunReport Run(const std::string& name, double* seconds = nullptr) {
    harness::ExperimentConfig cfg =
        harness::LoadExperimentConfig((config_dir / (name + ".json")).string());
    cfg.output_dir = (out_dir / name).string();
    Stopwatch clock;
    harness::RunReport r = harness::RunExperiment(cfg);
    if (seconds) *seconds = clock.Seconds();
    return r;
  }
};

double Mean(const harness::RunReport& r, const std::string& metric) {
  auto agg = r.Aggregate();
  auto it = agg.find(metric);
  return it == agg.end() || it->second.n == 0 ? std::nan("") : it->second.mean;
}

std::string Failures(const harness::RunReport& r) {
  return r.failed_count() ? fmt::format(" ({} seeds failed)", r.failed_count()) : "";
}

Outcome DefenseTrend(const harness::RunReport& labobf, double seconds) {
  const double undefended = Mean(labobf, "undefended_acc");
  const double upper = Mean(labobf, "r_upper");
  const double lower = Mean(labobf, "r_lower");
  const double attack = Mean(labobf, "attack_acc");
  const double main = Mean(labobf, "main_task_acc");
  const bool a = undefended >= 0.95;
  const bool b = upper >= lower;
  const bool c = attack <= lower + 0.02;
  const bool d = main >= undefended - 0.08;
  return {labobf.failed_count() == 0 && a && b && c && d && seconds < 180.0,
          fmt::format("(a) undefended {:.4f} {} (b) R_upper {:.4f} vs R_lower {:.4f} {} "
                      "(c) LabObf attack {:.4f} {} (d) LabObf main {:.4f} {}; {:.1f}s{}",
                      undefended, a ? "ok" : "low", upper, lower, b ? "ok" : "inverted",
                      attack, c ? "ok" : "high", main, d ? "ok" : "low", seconds,
                      Failures(labobf))};
}

Outcome ExtensionTrend(const harness::RunReport& plain_dcor,
                       const harness::RunReport& extension, double seconds) {
  const double without = Mean(plain_dcor, "attack_acc");
  const double with = Mean(extension, "attack_acc");
  const double main_without = Mean(plain_dcor, "main_task_acc");
  const double main_with = Mean(extension, "main_task_acc");
  const bool ok = plain_dcor.failed_count() == 0 && extension.failed_count() == 0 &&
                  with >= without + 0.03 && main_with >= main_without && seconds < 240.0;
  return {ok, fmt::format("attack {:.4f} -> {:.4f} with EA, main task {:.4f} -> {:.4f}; "
                          "{:.1f}s{}{}",
                          without, with, main_without, main_with, seconds,
                          Failures(plain_dcor), Failures(extension))};
}

Outcome DishonestCollapse(const harness::RunReport& honest,
                          const harness::RunReport& dishonest) {
  const double h = Mean(honest, "main_task_acc");
  const double d = Mean(dishonest, "main_task_acc");
  return {honest.failed_count() == 0 && dishonest.failed_count() == 0 && h - d >= 0.15,
          fmt::format("honest {:.4f}, shuffled reports {:.4f}, drop {:.4f}{}", h, d, h - d,
                      Failures(dishonest))};
}

Outcome Determinism(Runs& runs) {
  // Reduced copies of the LabObf and extension configs, run twice each.
  bool same = true;
  std::string detail;
  for (const std::string name : {"labobf_blobs", "extension_blobs"}) {
    harness::ExperimentConfig cfg =
        harness::LoadExperimentConfig((runs.config_dir / (name + ".json")).string());
    cfg.dataset.synth.n_per_class = 200;
    cfg.train.epochs = 5;
    cfg.attack.model_completion.epochs = 20;
    cfg.seeds = {1, 2};
    cfg.output_dir = (runs.out_dir / ("determinism_" + name)).string();
    const std::string first = harness::RunExperiment(cfg).Body().dump();
    const std::string second = harness::RunExperiment(cfg).Body().dump();
    same = same && first == second;
    detail += fmt::format("{}{} {}", detail.empty() ? "" : ", ", name,
                          first == second ? "identical" : "differs");
  }
  return {same, detail};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  Runs runs{fs::path(VFLSIM_SOURCE_DIR) / "configs", fs::temp_directory_path() / "vflsim_acceptance"};
  fs::remove_all(runs.out_dir);

  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "distance-correlation oracle", DcorOracle);
  report(2, "gradient correctness", GradientCorrectness);
  report(3, "split/monolithic equivalence", SplitMonolithEquivalence);
  report(4, "LabObf decode round-trip", DecodeRoundTrip);
  report(5, "validator fidelity", ValidatorFidelity);
  report(6, "binning mass", BinningMass);

  harness::RunReport labobf, discorloss, extension;
  double labobf_secs = 0.0, discorloss_secs = 0.0, extension_secs = 0.0;
  report(7, "defense trend", [&] {
    labobf = runs.Run("labobf_blobs", &labobf_secs);
    return DefenseTrend(labobf, labobf_secs);
  });
  report(8, "extension-attack trend", [&] {
    discorloss = runs.Run("discorloss_blobs", &discorloss_secs);
    extension = runs.Run("extension_blobs", &extension_secs);
    return ExtensionTrend(discorloss, extension, discorloss_secs + extension_secs);
  });
  report(9, "dishonest-client collapse", [&] {
    if (labobf.seeds.empty()) labobf = runs.Run("labobf_blobs");
    return DishonestCollapse(labobf, runs.Run("labobf_dishonest_blobs"));
  });
  report(10, "determinism", [&] { return Determinism(runs); });

  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
