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

// vflsim command-line front end.
//
//   vflsim run --config cfg.json
//   vflsim sweep --config cfg.json --axis aux_size --values 40,100,200
//   vflsim dump-embeddings --config cfg.json --seed 1 --limit 500 --output e.csv
//   vflsim validate-config --config cfg.json
//   vflsim gen-softmap --classes 2 --bins 2 --seed 7
//
// Exit codes: 0 success, 2 configuration error, 3 every seed failed,
// 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "vflsim/defense.hpp"
#include "vflsim/harness/config.hpp"
#include "vflsim/harness/runner.hpp"

namespace {

using vflsim::harness::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAllFailed = 3;
constexpr int kExitIo = 4;

struct Overrides {
  std::string config_path;
  std::optional<std::string> output_dir;
  std::vector<std::uint64_t> seeds;
  std::optional<int> epochs;
  std::optional<int> threads;
};

void AddOverrideFlags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--output-dir", o.output_dir, "overrides output_dir");
  cmd->add_option("--seeds", o.seeds, "overrides seeds")->delimiter(',');
  cmd->add_option("--epochs", o.epochs, "overrides train.epochs");
  cmd->add_option("--threads", o.threads, "overrides threads");
}

// Flags given on the command line replace the config file's values.
ExperimentConfig LoadWithOverrides(const Overrides& o) {
  ExperimentConfig cfg = vflsim::harness::LoadExperimentConfig(o.config_path);
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  if (o.threads) cfg.threads = *o.threads;
  cfg.Validate();
  return cfg;
}

void PrintSummary(const vflsim::harness::RunReport& report) {
  for (const auto& [name, m] : report.Aggregate()) {
    if (m.std) {
      std::printf("%-16s %.4f +/- %.4f (n=%zu)\n", name.c_str(), m.mean, *m.std, m.n);
    } else {
      std::printf("%-16s %.4f (n=%zu)\n", name.c_str(), m.mean, m.n);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vflsim: two-party split learning simulator"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

  Overrides run_o;
  std::string run_format = "both";
  auto* run = app.add_subcommand("run", "run one experiment");
  AddOverrideFlags(run, run_o);
  run->add_option("--format", run_format, "json|csv|both");

  Overrides sweep_o;
  std::string axis;
  std::vector<double> values;
  auto* sweep = app.add_subcommand("sweep", "repeat an experiment over one axis");
  AddOverrideFlags(sweep, sweep_o);
  sweep->add_option("--axis", axis, "aux_size|soft_label_count|lambda")->required();
  sweep->add_option("--values", values, "comma-separated values")
      ->delimiter(',')
      ->required();

  Overrides dump_o;
  std::uint64_t dump_seed = 1;
  std::size_t dump_limit = 500;
  std::string dump_output;
  auto* dump = app.add_subcommand("dump-embeddings", "train one seed and dump cut-layer rows");
  AddOverrideFlags(dump, dump_o);
  dump->add_option("--seed", dump_seed, "seed to train");
  dump->add_option("--limit", dump_limit, "maximum CSV data rows");
  dump->add_option("--output", dump_output, "destination CSV")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate-config", "parse and check a config");
  validate->add_option("-c,--config", validate_path, "experiment config (JSON)")->required();

  int classes = 2;
  int bins = 2;
  std::uint64_t map_seed = 1;
  std::optional<double> range_lo, range_hi;
  int attribute_max = 200;
  bool strict = false;
  std::string map_output;
  auto* gen = app.add_subcommand("gen-softmap", "generate, validate and print a soft-label map");
  gen->add_option("--classes", classes, "class count C");
  gen->add_option("--bins", bins, "soft labels per class N_b");
  gen->add_option("--seed", map_seed, "generator seed");
  gen->add_option("--range-lo", range_lo, "soft range lower end (default 0)");
  gen->add_option("--range-hi", range_hi, "soft range upper end (default C-1)");
  gen->add_option("--attribute-max", attribute_max, "random attribute maximum M");
  gen->add_flag("--strict", strict, "treat violations as errors");
  gen->add_option("--output", map_output, "also write the document to this file");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) {
      ExperimentConfig cfg = LoadWithOverrides(run_o);
      auto report = vflsim::harness::RunExperiment(cfg);
      for (const auto& p : vflsim::harness::EmitReport(
               report, cfg.output_dir, vflsim::harness::ParseReportFormat(run_format))) {
        std::printf("wrote %s\n", p.c_str());
      }
      PrintSummary(report);
      return report.failed_count() == report.seeds.size() ? kExitAllFailed : kExitOk;
    }
    if (*sweep) {
      ExperimentConfig cfg = LoadWithOverrides(sweep_o);
      auto result =
          vflsim::harness::Sweep(cfg, vflsim::harness::ParseSweepAxis(axis), values);
      bool any_ok = false;
      for (std::size_t i = 0; i < result.reports.size(); ++i) {
        const auto& r = result.reports[i];
        vflsim::harness::EmitReport(r, r.config.at("output_dir").get<std::string>());
        any_ok = any_ok || r.failed_count() < r.seeds.size();
        std::printf("== %s = %g\n", axis.c_str(), result.values[i]);
        PrintSummary(r);
      }
      auto table = std::filesystem::path(cfg.output_dir) / "sweep.csv";
      vflsim::harness::WriteSweepTable(result, table);
      std::printf("wrote %s\n", table.string().c_str());
      return any_ok ? kExitOk : kExitAllFailed;
    }
    if (*dump) {
      ExperimentConfig cfg = LoadWithOverrides(dump_o);
      cfg.seeds = {dump_seed};
      cfg.dump_embeddings = dump_limit;
      cfg.trace_sample_limit = std::max(cfg.trace_sample_limit, dump_limit / 2);
      auto report = vflsim::harness::RunExperiment(cfg);
      const auto& s = report.seeds.front();
      if (!s.ok) {
        std::fprintf(stderr, "seed %llu failed: %s\n",
                     static_cast<unsigned long long>(s.seed), s.error.c_str());
        return kExitAllFailed;
      }
      auto produced = s.artifacts.at("embeddings");
      std::filesystem::path dest(dump_output);
      if (dest.has_parent_path()) std::filesystem::create_directories(dest.parent_path());
      std::filesystem::copy_file(produced, dest,
                                 std::filesystem::copy_options::overwrite_existing);
      std::printf("wrote %s\n", dest.string().c_str());
      return kExitOk;
    }
    if (*validate) {
      ExperimentConfig cfg = vflsim::harness::LoadExperimentConfig(validate_path);
      std::printf("ok %s\n", vflsim::harness::ConfigHash(cfg).c_str());
      return kExitOk;
    }
    if (*gen) {
      vflsim::Rng rng(map_seed);
      auto map = vflsim::GenerateSoftLabelMap(classes, bins, range_lo.value_or(0.0),
                                              range_hi.value_or(classes - 1.0), rng);
      auto rule = vflsim::MakeBinningRule(attribute_max, bins);
      auto doc = vflsim::SoftLabelDocument(map, rule);
      std::printf("%s\n", doc.dump(2).c_str());
      auto violations = vflsim::ValidateSoftLabelMap(map, strict);
      for (const auto& v : violations) std::fprintf(stderr, "%s\n", v.ToString().c_str());
      if (!map_output.empty()) {
        std::ofstream out(map_output);
        if (!out) throw vflsim::IoError("cannot write " + map_output);
        out << doc.dump(2) << '\n';
      }
      return strict && !violations.empty() ? kExitConfig : kExitOk;
    }
  } catch (const vflsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const vflsim::ContractError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const vflsim::IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  }
  return kExitOk;
}
