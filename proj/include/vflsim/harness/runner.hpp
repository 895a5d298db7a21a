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

// Experiment runner: builds data, trains with the configured defense, runs
// attacks, collects per-seed metrics and aggregates them.

#ifndef VFLSIM_HARNESS_RUNNER_HPP_
#define VFLSIM_HARNESS_RUNNER_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include "vflsim/attack.hpp"
#include "vflsim/dataflow.hpp"
#include "vflsim/defense.hpp"
#include "vflsim/errors.hpp"
#include "vflsim/harness/config.hpp"
#include "vflsim/splitnn.hpp"
#include "vflsim/stats.hpp"

namespace vflsim::harness {

inline std::string Sha256Hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

// Hash of the canonical (sorted-key, compact) serialization of the config.
inline std::string ConfigHash(const ExperimentConfig& cfg) {
  return Sha256Hex(cfg.ToJson().dump());
}

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::map<std::string, double> metrics;
  std::vector<std::optional<double>> per_class_acc;
  std::vector<PearsonDimension> pearson_dims;
  std::map<std::string, std::string> artifacts;
  double wall_clock_seconds = 0.0;
};

struct MetricSummary {
  double mean = 0.0;
  std::optional<double> std;  // sample (n-1) standard deviation; none when n < 2
  std::size_t n = 0;
};

struct RunReport {
  nlohmann::json config;
  std::string config_hash;
  std::vector<std::string> metric_names;
  std::vector<SeedResult> seeds;
  double wall_clock_seconds = 0.0;

  std::size_t failed_count() const {
    std::size_t k = 0;
    for (const auto& s : seeds) k += !s.ok;
    return k;
  }

  std::map<std::string, MetricSummary> Aggregate() const {
    std::map<std::string, MetricSummary> out;
    for (const auto& name : metric_names) {
      std::vector<double> v;
      for (const auto& s : seeds) {
        auto it = s.metrics.find(name);
        if (s.ok && it != s.metrics.end()) v.push_back(it->second);
      }
      MetricSummary m;
      m.n = v.size();
      if (!v.empty()) {
        for (double x : v) m.mean += x;
        m.mean /= static_cast<double>(v.size());
      }
      if (v.size() >= 2) {
        double ss = 0.0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
      }
      out[name] = m;
    }
    return out;
  }

  // Everything except timing; identical inputs give identical bodies.
  nlohmann::json Body() const {
    using nlohmann::json;
    json seed_rows = json::array();
    for (const auto& s : seeds) {
      json row = {{"seed", s.seed}, {"status", s.ok ? "ok" : "failed"}};
      if (!s.ok) row["error"] = s.error;
      row["metrics"] = s.metrics;
      json per_class = json::array();
      for (const auto& v : s.per_class_acc) per_class.push_back(v ? json(*v) : json(nullptr));
      row["per_class_acc"] = per_class;
      if (!s.pearson_dims.empty()) {
        json dims = json::array();
        for (const auto& d : s.pearson_dims) {
          dims.push_back({{"dim", d.label}, {"r", d.r}, {"zero_variance", d.zero_variance}});
        }
        row["pearson_dims"] = dims;
      }
      row["artifacts"] = s.artifacts;
      seed_rows.push_back(row);
    }
    json aggregate = json::object();
    for (const auto& [name, m] : Aggregate()) {
      aggregate[name] = {{"mean", m.mean},
                         {"std", m.std ? json(*m.std) : json(nullptr)},
                         {"n", m.n}};
    }
    return {{"schema_version", kSchemaVersion},
            {"config_hash", config_hash},
            {"config", config},
            {"aggregation", "mean and sample standard deviation (n-1) over ok seeds"},
            {"metrics", metric_names},
            {"seeds", seed_rows},
            {"aggregate", aggregate}};
  }

  nlohmann::json ToJson() const {
    nlohmann::json j = Body();
    nlohmann::json per_seed = nlohmann::json::array();
    for (const auto& s : seeds) {
      per_seed.push_back({{"seed", s.seed}, {"wall_clock_seconds", s.wall_clock_seconds}});
    }
    j["timing"] = {{"wall_clock_seconds", wall_clock_seconds}, {"per_seed", per_seed}};
    return j;
  }
};

inline std::vector<std::string> MetricNames(const ExperimentConfig& cfg) {
  std::vector<std::string> names{"main_task_acc"};
  if (cfg.attack.kind != AttackKind::kNone) names.push_back("attack_acc");
  if (cfg.attack.references) {
    names.insert(names.end(), {"undefended_acc", "r_upper", "r_lower"});
  }
  return names;
}

namespace detail {

struct SeedData {
  VerticalDataset train;
  VerticalDataset validation;
};

inline SeedData BuildData(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedData out;
  if (cfg.dataset.kind == DatasetKind::kSynth) {
    Rng data_rng(DeriveSeed(seed, "data"));
    VerticalDataset ds = SynthBlobs(cfg.dataset.synth, data_rng);
    Rng split_rng(DeriveSeed(seed, "split"));
    DatasetSplits s = SplitTrainValidation(ds, cfg.dataset.validation_fraction, split_rng);
    out.train = std::move(s.train);
    out.validation = std::move(s.validation);
  } else {
    CsvSchema schema = CsvSchema::Load(cfg.dataset.schema_path);
    LoadedCsv loaded = LoadCsv(cfg.dataset.csv_path, schema);
    out.train = std::move(loaded.splits.train);
    out.validation = std::move(loaded.splits.validation);
  }
  if (out.train.size() < 2 || out.validation.size() == 0) {
    throw ContractError(fmt::format("seed {}: split left {} train and {} validation rows",
                                    seed, out.train.size(), out.validation.size()));
  }
  if (cfg.defense.kind == DefenseKind::kLabObf) {
    Rng train_rng(DeriveSeed(seed, "rand_train"));
    Rng val_rng(DeriveSeed(seed, "rand_validation"));
    out.train = AddRandomAttributes(std::move(out.train), cfg.defense.attribute_max, train_rng);
    out.validation =
        AddRandomAttributes(std::move(out.validation), cfg.defense.attribute_max, val_rng);
  }
  return out;
}

inline void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

inline std::string DumpTrace(const CutTrace& trace, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  WriteEmbeddingDump(path.string(), std::span<const CutTrace>(&trace, 1));
  return path.string();
}

inline SeedResult RunSeed(const ExperimentConfig& cfg, std::uint64_t seed) {
  SeedResult result;
  result.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    SeedData data = BuildData(cfg, seed);
    const bool labobf = cfg.defense.kind == DefenseKind::kLabObf;
    const int classes = data.train.class_count;
    const int attribute_max = cfg.defense.attribute_max;
    PartyData train = MakePartyData(data.train, labobf, attribute_max);
    PartyData validation = MakePartyData(data.validation, labobf, attribute_max);
    const std::filesystem::path out_dir(cfg.output_dir);
    const std::size_t dump_samples = cfg.dump_embeddings / 2;

    TrainConfig tcfg = cfg.train;
    tcfg.seed = DeriveSeed(seed, "train");
    AttackConfig acfg = cfg.attack.model_completion;
    acfg.seed = DeriveSeed(seed, "attack");

    const bool need_aux = cfg.attack.kind != AttackKind::kNone || cfg.attack.references;
    std::optional<AuxiliarySet> aux;
    if (need_aux) {
      Rng aux_rng(DeriveSeed(seed, "aux"));
      aux = SampleAuxiliary(data.train, cfg.attack.aux_size, aux_rng);
    }

    const std::size_t extension =
        cfg.attack.kind == AttackKind::kExtension ? cfg.attack.extension.width : 0;
    const std::size_t out_width = labobf ? 1 : static_cast<std::size_t>(classes);
    Rng model_rng(DeriveSeed(seed, "model"));
    SplitModel model = MakeSplitModel(train.client.features.cols(),
                                      train.host.features.cols(), out_width, cfg.model,
                                      model_rng, extension);

    TrainHistory history;
    std::unique_ptr<HostObjective> objective;
    std::optional<CutTrace> ea_trace;
    std::unique_ptr<UploadTransform> eval_transform;
    switch (cfg.defense.kind) {
      case DefenseKind::kNone:
        history = TrainPlain(model, train, &validation, tcfg);
        objective = std::make_unique<CrossEntropyObjective>();
        break;
      case DefenseKind::kDiscorloss: {
        DiscorlossConfig dcfg{cfg.defense.lambda};
        if (cfg.attack.kind == AttackKind::kExtension) {
          Rng gen_rng(DeriveSeed(seed, "generator"));
          ExtensionRun run = RunExtensionAttackTraining(
              model, train, &validation, dcfg, tcfg, aux->client_features, aux->labels,
              cfg.attack.extension, gen_rng, cfg.trace_sample_limit);
          history = std::move(run.history);
          if (run.trace.size() >= 2) {
            result.pearson_dims =
                PearsonDiagnostic(run.trace, cfg.attack.extension.width);
          }
          ea_trace = std::move(run.trace);
          eval_transform = std::make_unique<FrozenExtension>(run.generator);
        } else {
          history = TrainDiscorloss(model, train, &validation, dcfg, tcfg);
        }
        objective = std::make_unique<DiscorlossObjective>(dcfg);
        break;
      }
      case DefenseKind::kLabObf: {
        tcfg.loss_mode = LossMode::kMseSoft;
        auto range = cfg.defense.soft_range.value_or(
            std::make_pair(0.0, static_cast<double>(classes - 1)));
        Rng map_rng(DeriveSeed(seed, "softmap"));
        SoftLabelMap map = GenerateSoftLabelMap(classes, cfg.defense.bins_per_class,
                                                range.first, range.second, map_rng);
        for (const auto& v : ValidateSoftLabelMap(map, cfg.defense.strict)) {
          if (v.severity == Severity::kError) {
            throw ConfigError("soft-label map rejected: " + v.ToString());
          }
          spdlog::warn("seed {}: soft-label map: {}", seed, v.ToString());
        }
        BinningRule rule;
        if (cfg.defense.thresholds) {
          rule = {attribute_max, cfg.defense.bins_per_class, *cfg.defense.thresholds};
          rule.Validate();
        } else {
          rule = MakeBinningRule(attribute_max, cfg.defense.bins_per_class);
        }
        const auto softmap_path =
            out_dir / "host_private" / fmt::format("softmap_seed{}.json", seed);
        WriteJsonFile(softmap_path, SoftLabelDocument(map, rule));
        result.artifacts["softmap"] = softmap_path.string();
        std::optional<std::vector<int>> reported;
        if (cfg.defense.dishonest) {
          Rng lie_rng(DeriveSeed(seed, "dishonest"));
          reported = DishonestReport(train.client.rand, *cfg.defense.dishonest, lie_rng);
        }
        history = TrainLabObf(model, train, &validation, map, rule, tcfg,
                              reported ? &*reported : nullptr);
        objective = std::make_unique<LabObfObjective>(map, rule);
        break;
      }
    }

    std::vector<int> predicted =
        PredictLabels(model, validation.client.features, validation.host.features,
                      *objective, eval_transform.get());
    result.metrics["main_task_acc"] = Accuracy(predicted, validation.host.labels);
    result.per_class_acc = PerClassAccuracy(predicted, validation.host.labels, classes);

    if (cfg.attack.kind != AttackKind::kNone) {
      Tensor2 aux_x = AuxiliaryInputs(*aux, labobf, attribute_max);
      ShadowModel shadow = ModelCompletionAttack(model.client_spec, model.client, aux_x,
                                                 aux->labels, classes, acfg,
                                                 &train.client.features);
      result.metrics["attack_acc"] =
          EvaluateAttack(shadow, validation.client.features, validation.host.labels,
                         classes, aux->size(),
                         cfg.defense.kind == DefenseKind::kNone ? AttackScenario::kRUpper
                                                                : AttackScenario::kDefended)
              .attack_top1;
    }

    if (cfg.attack.references) {
      // References always use the plain (attribute-free) client columns.
      PartyData plain_train = MakePartyData(data.train, false);
      PartyData plain_validation = MakePartyData(data.validation, false);
      Rng ref_rng(DeriveSeed(seed, "model"));
      SplitModel reference = MakeSplitModel(plain_train.client.features.cols(),
                                            plain_train.host.features.cols(), classes,
                                            cfg.model, ref_rng);
      TrainConfig ref_cfg = cfg.train;
      ref_cfg.seed = tcfg.seed;
      ref_cfg.loss_mode = LossMode::kCrossEntropy;
      AttackReport upper = ComputeRUpper(reference, plain_train, plain_validation, ref_cfg,
                                         aux->client_features, aux->labels, acfg);
      result.metrics["undefended_acc"] = EvaluateAccuracy(
          reference, plain_validation, CrossEntropyObjective());
      result.metrics["r_upper"] = upper.attack_top1;
      result.metrics["r_lower"] =
          ComputeRLower(reference.client_spec, aux->client_features, aux->labels,
                        plain_validation.client.features, plain_validation.host.labels,
                        classes, acfg)
              .attack_top1;
    }

    if (dump_samples > 0) {
      CutTrace trace;
      if (ea_trace && ea_trace->size() >= dump_samples) {
        trace = *ea_trace;
        trace.row_ids.resize(dump_samples);
        trace.labels.resize(dump_samples);
        std::vector<std::size_t> head(dump_samples);
        std::iota(head.begin(), head.end(), 0);
        trace.client_embedding = trace.client_embedding.GatherRows(head);
        trace.host_embedding = trace.host_embedding.GatherRows(head);
      } else {
        trace = RecordCutTrace(model, train, dump_samples, nullptr, nullptr, tcfg.epochs);
      }
      result.artifacts["embeddings"] =
          DumpTrace(trace, out_dir / fmt::format("embeddings_seed{}.csv", seed));
    }
    result.ok = true;
  } catch (const std::exception& e) {
    result.ok = false;
    result.error = e.what();
    result.metrics.clear();
    result.per_class_acc.clear();
    result.pearson_dims.clear();
    spdlog::error("seed {} failed: {}", seed, e.what());
  }
  result.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace detail

// Runs every seed. A failing seed is recorded and the rest continue.
inline RunReport RunExperiment(const ExperimentConfig& cfg) {
  cfg.Validate();
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.config = cfg.ToJson();
  report.config_hash = ConfigHash(cfg);
  report.metric_names = MetricNames(cfg);
  report.seeds.resize(cfg.seeds.size());
  const std::size_t workers = static_cast<std::size_t>(cfg.threads);
  for (std::size_t begin = 0; begin < cfg.seeds.size(); begin += workers) {
    const std::size_t end = std::min(cfg.seeds.size(), begin + workers);
    if (workers == 1) {
      report.seeds[begin] = detail::RunSeed(cfg, cfg.seeds[begin]);
      continue;
    }
    std::vector<std::future<SeedResult>> pending;
    for (std::size_t i = begin; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, detail::RunSeed, std::cref(cfg),
                                   cfg.seeds[i]));
    }
    for (std::size_t i = begin; i < end; ++i) report.seeds[i] = pending[i - begin].get();
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  spdlog::info("run finished: {} seeds, {} failed, {:.1f}s", cfg.seeds.size(),
               report.failed_count(), report.wall_clock_seconds);
  return report;
}

enum class ReportFormat { kJson, kCsv, kBoth };

inline ReportFormat ParseReportFormat(const std::string& s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  if (s == "both") return ReportFormat::kBoth;
  throw ConfigError("unknown report format '" + s + "' (expected json, csv or both)");
}

// One row per (seed, metric); failed seeds get an empty value.
inline void WriteReportCsv(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "seed,metric,value\n";
  for (const auto& s : report.seeds) {
    for (const auto& name : report.metric_names) {
      out << s.seed << ',' << name << ',';
      auto it = s.metrics.find(name);
      if (s.ok && it != s.metrics.end()) out << fmt::format("{}", it->second);
      out << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

// Writes report.json and/or report.csv into `dir`; returns the paths.
inline std::vector<std::string> EmitReport(const RunReport& report,
                                           const std::filesystem::path& dir,
                                           ReportFormat format = ReportFormat::kBoth) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::string> paths;
  if (format != ReportFormat::kCsv) {
    auto p = dir / "report.json";
    detail::WriteJsonFile(p, report.ToJson());
    paths.push_back(p.string());
  }
  if (format != ReportFormat::kJson) {
    auto p = dir / "report.csv";
    WriteReportCsv(report, p);
    paths.push_back(p.string());
  }
  return paths;
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { kAuxSize, kSoftLabelCount, kLambda };

inline SweepAxis ParseSweepAxis(const std::string& s) {
  if (s == "aux_size") return SweepAxis::kAuxSize;
  if (s == "soft_label_count") return SweepAxis::kSoftLabelCount;
  if (s == "lambda") return SweepAxis::kLambda;
  throw ConfigError("unknown sweep axis '" + s +
                    "' (expected aux_size, soft_label_count or lambda)");
}

inline const char* SweepAxisName(SweepAxis a) {
  switch (a) {
    case SweepAxis::kAuxSize: return "aux_size";
    case SweepAxis::kSoftLabelCount: return "soft_label_count";
    case SweepAxis::kLambda: return "lambda";
  }
  return "unknown";
}

inline ExperimentConfig ApplySweepValue(ExperimentConfig cfg, SweepAxis axis, double value) {
  auto as_count = [&](const char* what) {
    if (!(value >= 1.0) || value != std::floor(value)) {
      throw ConfigError(std::string(what) + " sweep values must be positive integers");
    }
    return static_cast<std::size_t>(value);
  };
  switch (axis) {
    case SweepAxis::kAuxSize:
      if (cfg.attack.kind == AttackKind::kNone && !cfg.attack.references) {
        throw ConfigError("aux_size sweep needs an attack or references");
      }
      cfg.attack.aux_size = as_count("aux_size");
      break;
    case SweepAxis::kSoftLabelCount:
      if (cfg.defense.kind != DefenseKind::kLabObf) {
        throw ConfigError("soft_label_count sweep needs defense labobf");
      }
      cfg.defense.bins_per_class = static_cast<int>(as_count("soft_label_count"));
      cfg.defense.thresholds.reset();
      break;
    case SweepAxis::kLambda:
      if (cfg.defense.kind != DefenseKind::kDiscorloss) {
        throw ConfigError("lambda sweep needs defense discorloss");
      }
      if (!(value >= 0.0)) throw ConfigError("lambda sweep values must be >= 0");
      cfg.defense.lambda = value;
      break;
  }
  cfg.output_dir =
      (std::filesystem::path(cfg.output_dir) /
       fmt::format("{}_{}", SweepAxisName(axis), value))
          .string();
  cfg.Validate();
  return cfg;
}

struct SweepResult {
  SweepAxis axis;
  std::vector<double> values;
  std::vector<RunReport> reports;
};

inline SweepResult Sweep(const ExperimentConfig& cfg, SweepAxis axis,
                         const std::vector<double>& values) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  std::vector<ExperimentConfig> configs;
  for (double v : values) configs.push_back(ApplySweepValue(cfg, axis, v));
  SweepResult out{axis, values, {}};
  for (const auto& c : configs) out.reports.push_back(RunExperiment(c));
  return out;
}

// Long-form table keyed by (axis value, seed).
inline void WriteSweepTable(const SweepResult& sweep, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << SweepAxisName(sweep.axis) << ",seed,metric,value\n";
  for (std::size_t i = 0; i < sweep.values.size(); ++i) {
    const RunReport& r = sweep.reports[i];
    for (const auto& s : r.seeds) {
      for (const auto& name : r.metric_names) {
        out << fmt::format("{}", sweep.values[i]) << ',' << s.seed << ',' << name << ',';
        auto it = s.metrics.find(name);
        if (s.ok && it != s.metrics.end()) out << fmt::format("{}", it->second);
        out << '\n';
      }
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace vflsim::harness

#endif  // VFLSIM_HARNESS_RUNNER_HPP_
