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

// Experiment configuration: a versioned JSON document that composes a
// dataset, a split model, one defense, at most one attack and a seed list.

#ifndef VFLSIM_HARNESS_CONFIG_HPP_
#define VFLSIM_HARNESS_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vflsim/attack.hpp"
#include "vflsim/dataflow.hpp"
#include "vflsim/defense.hpp"
#include "vflsim/errors.hpp"
#include "vflsim/splitnn.hpp"

namespace vflsim::harness {

inline constexpr int kSchemaVersion = 1;

enum class DatasetKind { kSynth, kCsv };
enum class DefenseKind { kNone, kDiscorloss, kLabObf };
enum class AttackKind { kNone, kModelCompletion, kExtension };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::kSynth;
  BlobParams synth;
  std::string csv_path;
  std::string schema_path;
  double validation_fraction = 0.2;
};

struct DefenseConfig {
  DefenseKind kind = DefenseKind::kNone;
  double lambda = 0.08;
  int bins_per_class = 2;
  std::optional<std::pair<double, double>> soft_range;  // default [0, C-1]
  int attribute_max = 200;
  std::optional<std::vector<int>> thresholds;  // default per MakeBinningRule
  std::optional<DishonestMode> dishonest;
  bool strict = false;
};

struct AttackBlock {
  AttackKind kind = AttackKind::kNone;
  std::size_t aux_size = 100;
  AttackConfig model_completion;
  ExtensionConfig extension;
  bool references = false;  // also compute r_upper and r_lower
};

struct ExperimentConfig {
  DatasetConfig dataset;
  SplitArchitecture model;
  TrainConfig train;
  DefenseConfig defense;
  AttackBlock attack;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "vflsim_out";
  std::size_t trace_sample_limit = 500;
  std::size_t dump_embeddings = 0;  // rows per seed; 0 disables the dump
  int threads = 1;

  void Validate() const;
  nlohmann::json ToJson() const;
};

inline const char* DefenseName(DefenseKind k) {
  switch (k) {
    case DefenseKind::kNone: return "none";
    case DefenseKind::kDiscorloss: return "discorloss";
    case DefenseKind::kLabObf: return "labobf";
  }
  return "none";
}

inline const char* AttackName(AttackKind k) {
  switch (k) {
    case AttackKind::kNone: return "none";
    case AttackKind::kModelCompletion: return "model_completion";
    case AttackKind::kExtension: return "extension";
  }
  return "none";
}

inline void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (seeds.empty()) fail("seeds must be non-empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    fail("seeds must be distinct");
  }
  if (threads < 1) fail("threads must be >= 1");
  if (dataset.kind == DatasetKind::kSynth) {
    const auto& s = dataset.synth;
    if (s.class_count < 2) fail("dataset.synth.class_count must be >= 2");
    if (s.dims_client < 1 || s.dims_host < 1 || s.n_per_class < 1) {
      fail("dataset.synth dims and n_per_class must be >= 1");
    }
    if (!(s.cluster_spread >= 0.0)) fail("dataset.synth.cluster_spread must be >= 0");
  } else if (dataset.csv_path.empty() || dataset.schema_path.empty()) {
    fail("dataset.csv needs path and schema");
  }
  if (!(dataset.validation_fraction > 0.0 && dataset.validation_fraction < 1.0)) {
    fail("dataset.validation_fraction must be in (0, 1)");
  }
  if (model.cut_dim < 1) fail("model.cut_dim must be >= 1");
  try {
    train.Validate();
  } catch (const ContractError& e) {
    fail(std::string("train: ") + e.what());
  }
  if (train.epochs < 1) fail("train.epochs must be >= 1");
  switch (defense.kind) {
    case DefenseKind::kNone:
      break;
    case DefenseKind::kDiscorloss:
      if (!(defense.lambda >= 0.0)) fail("defense.lambda must be >= 0");
      break;
    case DefenseKind::kLabObf:
      if (defense.bins_per_class < 1) fail("defense.bins_per_class must be >= 1");
      if (defense.attribute_max < 1) fail("defense.attribute_max must be >= 1");
      if (defense.bins_per_class > defense.attribute_max) {
        fail("defense.bins_per_class exceeds attribute_max");
      }
      if (defense.soft_range && !(defense.soft_range->second > defense.soft_range->first)) {
        fail("defense.soft_range must be an increasing pair");
      }
      if (defense.thresholds &&
          defense.thresholds->size() != static_cast<std::size_t>(defense.bins_per_class - 1)) {
        fail("defense.thresholds must hold bins_per_class - 1 values");
      }
      break;
  }
  if (defense.dishonest && defense.kind != DefenseKind::kLabObf) {
    fail("defense.dishonest only applies to labobf");
  }
  if (attack.kind == AttackKind::kExtension &&
      !(defense.kind == DefenseKind::kDiscorloss && defense.lambda > 0.0)) {
    fail("attack.extension requires defense discorloss with lambda > 0");
  }
  if (attack.kind != AttackKind::kNone || attack.references) {
    if (attack.aux_size < 1) fail("attack.aux_size must be >= 1");
    try {
      attack.model_completion.Validate();
    } catch (const ContractError& e) {
      fail(std::string("attack: ") + e.what());
    }
  }
  if (attack.kind == AttackKind::kExtension) {
    if (attack.extension.width < 1) fail("attack.perturbation_width must be >= 1");
    if (attack.extension.inner_epochs < 0) fail("attack.inner_epochs must be >= 0");
    if (!(attack.extension.inner_learning_rate > 0.0)) {
      fail("attack.inner_learning_rate must be positive");
    }
  }
}

namespace detail {

using nlohmann::json;

// Reads keys from a JSON object and rejects any it does not recognize.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  bool Has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& At(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        throw ConfigError(where_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline ExperimentConfig ParseExperimentConfig(const nlohmann::json& j) {
  using detail::Reader;
  ExperimentConfig cfg;
  Reader top(j, "config");
  int version = 0;
  top.Get("schema_version", version);
  if (version != kSchemaVersion) {
    throw ConfigError("config: schema_version must be " + std::to_string(kSchemaVersion));
  }

  if (top.Has("dataset")) {
    Reader d(top.At("dataset"), "dataset");
    std::string kind = "synth";
    d.Get("kind", kind);
    d.Get("validation_fraction", cfg.dataset.validation_fraction);
    if (kind == "synth") {
      cfg.dataset.kind = DatasetKind::kSynth;
      if (d.Has("synth")) {
        Reader s(d.At("synth"), "dataset.synth");
        s.Get("class_count", cfg.dataset.synth.class_count);
        s.Get("dims_client", cfg.dataset.synth.dims_client);
        s.Get("dims_host", cfg.dataset.synth.dims_host);
        s.Get("n_per_class", cfg.dataset.synth.n_per_class);
        s.Get("cluster_spread", cfg.dataset.synth.cluster_spread);
        s.Finish();
      }
    } else if (kind == "csv") {
      cfg.dataset.kind = DatasetKind::kCsv;
      if (!d.Has("csv")) throw ConfigError("dataset: kind csv needs a csv block");
      Reader c(d.At("csv"), "dataset.csv");
      c.Get("path", cfg.dataset.csv_path);
      c.Get("schema", cfg.dataset.schema_path);
      c.Finish();
    } else {
      throw ConfigError("dataset.kind must be synth or csv, got '" + kind + "'");
    }
    d.Finish();
  }

  if (top.Has("model")) {
    Reader m(top.At("model"), "model");
    m.Get("client_hidden", cfg.model.client_hidden);
    m.Get("host_hidden", cfg.model.host_hidden);
    m.Get("top_hidden", cfg.model.top_hidden);
    m.Get("cut_dim", cfg.model.cut_dim);
    m.Finish();
  }

  if (top.Has("train")) {
    Reader t(top.At("train"), "train");
    t.Get("epochs", cfg.train.epochs);
    t.Get("batch_size", cfg.train.batch_size);
    t.Get("learning_rate", cfg.train.learning_rate);
    std::string opt = OptimizerName(cfg.train.optimizer);
    t.Get("optimizer", opt);
    cfg.train.optimizer = ParseOptimizerKind(opt);
    t.Finish();
  }

  if (top.Has("defense")) {
    Reader d(top.At("defense"), "defense");
    std::string kind = "none";
    d.Get("kind", kind);
    if (kind == "none") {
      cfg.defense.kind = DefenseKind::kNone;
    } else if (kind == "discorloss") {
      cfg.defense.kind = DefenseKind::kDiscorloss;
    } else if (kind == "labobf") {
      cfg.defense.kind = DefenseKind::kLabObf;
    } else {
      throw ConfigError("defense.kind must be none, discorloss or labobf, got '" + kind + "'");
    }
    d.Get("lambda", cfg.defense.lambda);
    d.Get("bins_per_class", cfg.defense.bins_per_class);
    d.Get("attribute_max", cfg.defense.attribute_max);
    d.Get("strict", cfg.defense.strict);
    if (d.Has("soft_range")) {
      std::vector<double> r;
      d.Get("soft_range", r);
      if (r.size() != 2) throw ConfigError("defense.soft_range needs two values");
      cfg.defense.soft_range = std::make_pair(r[0], r[1]);
    }
    if (d.Has("thresholds")) {
      std::vector<int> t;
      d.Get("thresholds", t);
      cfg.defense.thresholds = t;
    }
    if (d.Has("dishonest")) {
      std::string mode;
      d.Get("dishonest", mode);
      if (mode != "none") cfg.defense.dishonest = ParseDishonestMode(mode);
    }
    d.Finish();
  }

  if (top.Has("attack")) {
    Reader a(top.At("attack"), "attack");
    std::string kind = "none";
    a.Get("kind", kind);
    if (kind == "none") {
      cfg.attack.kind = AttackKind::kNone;
    } else if (kind == "model_completion") {
      cfg.attack.kind = AttackKind::kModelCompletion;
    } else if (kind == "extension") {
      cfg.attack.kind = AttackKind::kExtension;
    } else {
      throw ConfigError("attack.kind must be none, model_completion or extension, got '" +
                        kind + "'");
    }
    auto& mc = cfg.attack.model_completion;
    a.Get("aux_size", cfg.attack.aux_size);
    a.Get("references", cfg.attack.references);
    a.Get("head_hidden", mc.head_hidden);
    a.Get("epochs", mc.epochs);
    a.Get("batch_size", mc.batch_size);
    a.Get("learning_rate", mc.learning_rate);
    std::string opt = OptimizerName(mc.optimizer);
    a.Get("optimizer", opt);
    mc.optimizer = ParseOptimizerKind(opt);
    a.Get("fine_tune_bottom", mc.fine_tune_bottom);
    a.Get("pseudo_label", mc.pseudo_label);
    a.Get("pseudo_threshold", mc.pseudo_threshold);
    auto& ex = cfg.attack.extension;
    a.Get("perturbation_width", ex.width);
    a.Get("inner_epochs", ex.inner_epochs);
    a.Get("inner_learning_rate", ex.inner_learning_rate);
    std::string inner = OptimizerName(ex.inner_optimizer);
    a.Get("inner_optimizer", inner);
    ex.inner_optimizer = ParseOptimizerKind(inner);
    a.Finish();
  }

  top.Get("seeds", cfg.seeds);
  top.Get("output_dir", cfg.output_dir);
  top.Get("trace_sample_limit", cfg.trace_sample_limit);
  top.Get("dump_embeddings", cfg.dump_embeddings);
  top.Get("threads", cfg.threads);
  top.Finish();
  cfg.Validate();
  return cfg;
}

inline ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  ExperimentConfig cfg = ParseExperimentConfig(j);
  // Relative dataset paths are relative to the config file.
  const auto base = std::filesystem::path(path).parent_path();
  for (std::string* p : {&cfg.dataset.csv_path, &cfg.dataset.schema_path}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) {
      *p = (base / *p).lexically_normal().string();
    }
  }
  return cfg;
}

// Fully expanded form with every default filled in. Object keys come out
// sorted, which makes dump() a canonical serialization.
inline nlohmann::json ExperimentConfig::ToJson() const {
  using nlohmann::json;
  json dataset_j = {{"kind", dataset.kind == DatasetKind::kSynth ? "synth" : "csv"},
                    {"validation_fraction", dataset.validation_fraction}};
  if (dataset.kind == DatasetKind::kSynth) {
    dataset_j["synth"] = {{"class_count", dataset.synth.class_count},
                          {"dims_client", dataset.synth.dims_client},
                          {"dims_host", dataset.synth.dims_host},
                          {"n_per_class", dataset.synth.n_per_class},
                          {"cluster_spread", dataset.synth.cluster_spread}};
  } else {
    dataset_j["csv"] = {{"path", dataset.csv_path}, {"schema", dataset.schema_path}};
  }
  json defense_j = {{"kind", DefenseName(defense.kind)}};
  if (defense.kind == DefenseKind::kDiscorloss) defense_j["lambda"] = defense.lambda;
  if (defense.kind == DefenseKind::kLabObf) {
    defense_j["bins_per_class"] = defense.bins_per_class;
    defense_j["attribute_max"] = defense.attribute_max;
    defense_j["strict"] = defense.strict;
    defense_j["dishonest"] = !defense.dishonest ? "none"
                             : *defense.dishonest == DishonestMode::kShuffle ? "shuffle"
                                                                             : "constant";
    if (defense.soft_range) {
      defense_j["soft_range"] = {defense.soft_range->first, defense.soft_range->second};
    }
    if (defense.thresholds) defense_j["thresholds"] = *defense.thresholds;
  }
  const auto& mc = attack.model_completion;
  json attack_j = {{"kind", AttackName(attack.kind)}};
  if (attack.kind != AttackKind::kNone || attack.references) {
    attack_j.update({{"aux_size", attack.aux_size},
                     {"references", attack.references},
                     {"head_hidden", mc.head_hidden},
                     {"epochs", mc.epochs},
                     {"batch_size", mc.batch_size},
                     {"learning_rate", mc.learning_rate},
                     {"optimizer", OptimizerName(mc.optimizer)},
                     {"fine_tune_bottom", mc.fine_tune_bottom},
                     {"pseudo_label", mc.pseudo_label},
                     {"pseudo_threshold", mc.pseudo_threshold}});
  }
  if (attack.kind == AttackKind::kExtension) {
    attack_j.update({{"perturbation_width", attack.extension.width},
                     {"inner_epochs", attack.extension.inner_epochs},
                     {"inner_learning_rate", attack.extension.inner_learning_rate},
                     {"inner_optimizer", OptimizerName(attack.extension.inner_optimizer)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"dataset", dataset_j},
          {"model",
           {{"client_hidden", model.client_hidden},
            {"host_hidden", model.host_hidden},
            {"top_hidden", model.top_hidden},
            {"cut_dim", model.cut_dim}}},
          {"train",
           {{"epochs", train.epochs},
            {"batch_size", train.batch_size},
            {"learning_rate", train.learning_rate},
            {"optimizer", OptimizerName(train.optimizer)}}},
          {"defense", defense_j},
          {"attack", attack_j},
          {"seeds", seeds},
          {"output_dir", output_dir},
          {"trace_sample_limit", trace_sample_limit},
          {"dump_embeddings", dump_embeddings},
          {"threads", threads}};
}

}  // namespace vflsim::harness

#endif  // VFLSIM_HARNESS_CONFIG_HPP_
