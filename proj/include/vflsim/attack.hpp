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

// Client-side adversary: model-completion label inference, its upper and
// lower reference runs, and the embedding extension attack against
// Discorloss.
//
// Nothing here takes the top model, host features or the soft-label map as
// input; the attacker works with its own bottom model, its own features, a
// small labeled auxiliary set and whatever gradients come back to it.

#ifndef VFLSIM_ATTACK_HPP_
#define VFLSIM_ATTACK_HPP_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "vflsim/defense.hpp"
#include "vflsim/errors.hpp"
#include "vflsim/ndcore/mlp.hpp"
#include "vflsim/ndcore/optim.hpp"
#include "vflsim/ndcore/rng.hpp"
#include "vflsim/ndcore/tape.hpp"
#include "vflsim/splitnn.hpp"
#include "vflsim/stats.hpp"

namespace vflsim {

// ---------------------------------------------------------------------------
// Model completion

struct AttackConfig {
  std::vector<std::size_t> head_hidden{32};
  int epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-2;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  bool fine_tune_bottom = false;
  bool pseudo_label = false;
  double pseudo_threshold = 0.95;
  std::uint64_t seed = 0;

  void Validate() const {
    if (epochs < 0) throw ContractError("AttackConfig: epochs must be >= 0");
    if (batch_size < 1) throw ContractError("AttackConfig: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ContractError("AttackConfig: learning_rate must be positive");
    if (!(pseudo_threshold > 0.0 && pseudo_threshold <= 1.0)) {
      throw ContractError("AttackConfig: pseudo_threshold must be in (0, 1]");
    }
  }
};

// Copy of the client bottom plus an inference head over true classes.
struct ShadowModel {
  MlpSpec bottom_spec;
  MlpParams bottom;
  MlpSpec head_spec;
  MlpParams head;

  Tensor2 Logits(const Tensor2& x) const {
    return MlpEval(head_spec, head, MlpEval(bottom_spec, bottom, x));
  }

  std::vector<int> Predict(const Tensor2& x) const {
    Tensor2 logits = Logits(x);
    std::vector<int> out(logits.rows());
    for (std::size_t r = 0; r < logits.rows(); ++r) out[r] = ArgMax(logits.row(r));
    return out;
  }
};

enum class AttackScenario { kRUpper, kRLower, kDefended };

inline const char* ScenarioName(AttackScenario s) {
  switch (s) {
    case AttackScenario::kRUpper: return "r_upper";
    case AttackScenario::kRLower: return "r_lower";
    case AttackScenario::kDefended: return "defended";
  }
  return "unknown";
}

struct AttackReport {
  double attack_top1 = 0.0;
  std::vector<std::optional<double>> per_class;
  std::size_t aux_size = 0;
  AttackScenario scenario = AttackScenario::kDefended;
};

namespace detail {

// Cross-entropy fit of head (and optionally bottom) on (x, y).
inline void FitShadow(ShadowModel& shadow, const Tensor2& x, std::span<const int> y,
                      bool train_bottom, const AttackConfig& cfg, std::uint64_t seed) {
  if (cfg.epochs == 0 || x.rows() == 0) return;
  OptimState head_opt = OptimState::Create(cfg.optimizer, cfg.learning_rate, shadow.head);
  OptimState bottom_opt =
      OptimState::Create(cfg.optimizer, cfg.learning_rate, shadow.bottom);
  // A frozen bottom only needs one forward pass.
  std::optional<Tensor2> features;
  if (!train_bottom) features = MlpEval(shadow.bottom_spec, shadow.bottom, x);

  std::vector<std::size_t> order(x.rows());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(epoch)));
    rng.Shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      std::span<const std::size_t> rows(order.data() + start,
                                        std::min(cfg.batch_size, order.size() - start));
      std::vector<int> labels;
      for (std::size_t r : rows) labels.push_back(y[r]);
      Tape tape;
      MlpBinding bottom_binding, head_binding;
      ValueId f;
      if (train_bottom) {
        f = MlpForward(shadow.bottom_spec, shadow.bottom, tape,
                       tape.Leaf(x.GatherRows(rows)), &bottom_binding);
      } else {
        f = tape.Leaf(features->GatherRows(rows));
      }
      ValueId logits = MlpForward(shadow.head_spec, shadow.head, tape, f, &head_binding);
      tape.Backward(SoftmaxCrossEntropy(tape, logits, labels));
      OptimStep(shadow.head, CollectGradients(tape, head_binding), head_opt);
      if (train_bottom) {
        OptimStep(shadow.bottom, CollectGradients(tape, bottom_binding), bottom_opt);
      }
    }
  }
}

inline MlpSpec HeadSpec(std::size_t in, const AttackConfig& cfg, int class_count) {
  std::vector<std::size_t> widths{in};
  widths.insert(widths.end(), cfg.head_hidden.begin(), cfg.head_hidden.end());
  widths.push_back(static_cast<std::size_t>(class_count));
  return {widths, Activation::kRelu, Activation::kIdentity, "attack_head"};
}

inline void WarnMissingClasses(std::span<const int> labels, int class_count) {
  std::vector<bool> seen(class_count, false);
  for (int y : labels) seen.at(y) = true;
  for (int c = 0; c < class_count; ++c) {
    if (!seen[c]) spdlog::warn("auxiliary set has no rows of class {}", c);
  }
}

// One self-training round: confident predictions on unlabeled rows join the
// labeled set.
inline void PseudoLabelRound(ShadowModel& shadow, const Tensor2& aux_x,
                             std::span<const int> aux_y, const Tensor2& unlabeled,
                             bool train_bottom, const AttackConfig& cfg) {
  Tensor2 logits = shadow.Logits(unlabeled);
  std::vector<std::size_t> keep;
  std::vector<int> labels(aux_y.begin(), aux_y.end());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    int best = ArgMax(row);
    double denom = 0.0;
    for (double v : row) denom += std::exp(v - row[best]);
    if (1.0 / denom >= cfg.pseudo_threshold) {
      keep.push_back(r);
      labels.push_back(best);
    }
  }
  if (keep.empty()) return;
  Tensor2 extra = unlabeled.GatherRows(keep);
  Tensor2 x(aux_x.rows() + extra.rows(), aux_x.cols());
  std::copy(aux_x.values().begin(), aux_x.values().end(), x.values().begin());
  std::copy(extra.values().begin(), extra.values().end(),
            x.values().begin() + aux_x.size());
  FitShadow(shadow, x, labels, train_bottom, cfg, DeriveSeed(cfg.seed, "pseudo"));
}

}  // namespace detail

// Attaches a fresh head to a copy of `bottom` and fits it on the auxiliary
// rows. The caller's bottom parameters are never modified.
inline ShadowModel ModelCompletionAttack(const MlpSpec& bottom_spec,
                                         const MlpParams& bottom, const Tensor2& aux_x,
                                         std::span<const int> aux_y, int class_count,
                                         const AttackConfig& cfg,
                                         const Tensor2* unlabeled = nullptr) {
  cfg.Validate();
  if (aux_x.rows() == 0) throw ContractError("model completion: empty auxiliary set");
  if (aux_x.rows() != aux_y.size()) {
    throw DimensionError("model completion: auxiliary features and labels differ in length");
  }
  detail::WarnMissingClasses(aux_y, class_count);
  ShadowModel shadow;
  shadow.bottom_spec = bottom_spec;
  shadow.bottom = bottom;
  shadow.head_spec = detail::HeadSpec(bottom_spec.output_width(), cfg, class_count);
  Rng init(DeriveSeed(cfg.seed, "attack_head"));
  shadow.head = MlpInit(shadow.head_spec, init);
  detail::FitShadow(shadow, aux_x, aux_y, cfg.fine_tune_bottom, cfg,
                    DeriveSeed(cfg.seed, "attack_fit"));
  if (cfg.pseudo_label && unlabeled != nullptr && unlabeled->rows() > 0) {
    detail::PseudoLabelRound(shadow, aux_x, aux_y, *unlabeled, cfg.fine_tune_bottom, cfg);
  }
  return shadow;
}

inline AttackReport EvaluateAttack(const ShadowModel& shadow, const Tensor2& x,
                                   std::span<const int> labels, int class_count,
                                   std::size_t aux_size, AttackScenario scenario) {
  std::vector<int> predicted = shadow.Predict(x);
  AttackReport report;
  report.attack_top1 = Accuracy(predicted, labels);
  report.per_class = PerClassAccuracy(predicted, labels, class_count);
  report.aux_size = aux_size;
  report.scenario = scenario;
  return report;
}

// Attack on a bottom model that was never federated: same shadow
// architecture, bottom freshly initialized and trained on the auxiliary set
// together with the head.
inline AttackReport ComputeRLower(const MlpSpec& bottom_spec, const Tensor2& aux_x,
                                  std::span<const int> aux_y, const Tensor2& eval_x,
                                  std::span<const int> eval_y, int class_count,
                                  const AttackConfig& cfg) {
  cfg.Validate();
  if (aux_x.rows() == 0) throw ContractError("r_lower: empty auxiliary set");
  detail::WarnMissingClasses(aux_y, class_count);
  ShadowModel shadow;
  shadow.bottom_spec = bottom_spec;
  Rng init(DeriveSeed(cfg.seed, "r_lower_bottom"));
  shadow.bottom = MlpInit(bottom_spec, init);
  shadow.head_spec = detail::HeadSpec(bottom_spec.output_width(), cfg, class_count);
  Rng head_init(DeriveSeed(cfg.seed, "attack_head"));
  shadow.head = MlpInit(shadow.head_spec, head_init);
  detail::FitShadow(shadow, aux_x, aux_y, /*train_bottom=*/true, cfg,
                    DeriveSeed(cfg.seed, "attack_fit"));
  return EvaluateAttack(shadow, eval_x, eval_y, class_count, aux_y.size(),
                        AttackScenario::kRLower);
}

// Trains an undefended split model, then attacks its client bottom.
inline AttackReport ComputeRUpper(SplitModel& model, const PartyData& train,
                                  const PartyData& validation,
                                  const TrainConfig& train_cfg, const Tensor2& aux_x,
                                  std::span<const int> aux_y, const AttackConfig& cfg) {
  TrainPlain(model, train, &validation, train_cfg);
  const int classes = validation.host.class_count;
  ShadowModel shadow = ModelCompletionAttack(model.client_spec, model.client, aux_x, aux_y,
                                             classes, cfg, &train.client.features);
  return EvaluateAttack(shadow, validation.client.features, validation.host.labels,
                        classes, aux_y.size(), AttackScenario::kRUpper);
}

// ---------------------------------------------------------------------------
// Embedding extension

// Linear map from the cut embedding to p perturbation columns.
struct PerturbationGenerator {
  MlpSpec spec;
  MlpParams params;

  static PerturbationGenerator Create(std::size_t cut_dim, std::size_t width, Rng& rng) {
    if (width < 1) throw ContractError("perturbation width must be >= 1");
    PerturbationGenerator g;
    g.spec = {{cut_dim, width}, Activation::kIdentity, Activation::kIdentity,
              "perturbation"};
    g.params = MlpInit(g.spec, rng);
    return g;
  }

  std::size_t width() const { return spec.output_width(); }
};

// Fits g on the auxiliary rows to lower dCor([f | g(f)], onehot(y)) with the
// bottom held fixed. Returns the objective measured before each update, plus
// the value after the last one.
inline std::vector<double> TrainPerturbationGenerator(
    PerturbationGenerator& g, const MlpSpec& bottom_spec, const MlpParams& bottom,
    const Tensor2& aux_x, std::span<const int> aux_y, int class_count, int epochs,
    double learning_rate, OptimizerKind optimizer = OptimizerKind::kSgd) {
  if (aux_x.rows() < 2) throw ContractError("perturbation generator: need >= 2 aux rows");
  if (g.spec.input_width() != bottom_spec.output_width()) {
    throw DimensionError("perturbation generator: input width " +
                         std::to_string(g.spec.input_width()) + " != cut width " +
                         std::to_string(bottom_spec.output_width()));
  }
  const Tensor2 f = MlpEval(bottom_spec, bottom, aux_x);
  const Tensor2 y = OneHot(aux_y, class_count);
  OptimState opt = OptimState::Create(optimizer, learning_rate, g.params);
  std::vector<double> objective;
  for (int epoch = 0; epoch <= epochs; ++epoch) {
    Tape tape;
    ValueId fv = tape.Leaf(f);
    MlpBinding binding;
    ValueId pert = MlpForward(g.spec, g.params, tape, fv, &binding);
    ValueId loss =
        DistanceCorrelation(tape, ConcatCols(tape, fv, pert), tape.Leaf(y));
    objective.push_back(tape.value(loss).item());
    if (epoch == epochs) break;
    tape.Backward(loss);
    OptimStep(g.params, CollectGradients(tape, binding), opt);
  }
  return objective;
}

struct ExtensionConfig {
  std::size_t width = 4;
  int inner_epochs = 20;
  double inner_learning_rate = 1e-2;
  OptimizerKind inner_optimizer = OptimizerKind::kSgd;
};

// Client-side upload transform: before every outer epoch it refits g on the
// auxiliary set, then uploads [f | g(f)]. The host's gradient flows back
// through g into the bottom; g itself is only changed by the client's own
// refit.
class EmbeddingExtension : public UploadTransform {
 public:
  EmbeddingExtension(PerturbationGenerator generator, Tensor2 aux_x, std::vector<int> aux_y,
                     int class_count, ExtensionConfig cfg)
      : generator_(std::move(generator)),
        aux_x_(std::move(aux_x)),
        aux_y_(std::move(aux_y)),
        class_count_(class_count),
        cfg_(cfg) {}

  std::size_t ExtraWidth() const override { return generator_.width(); }

  void OnEpochStart(const MlpSpec& bottom_spec, const MlpParams& bottom) override {
    auto values = TrainPerturbationGenerator(generator_, bottom_spec, bottom, aux_x_,
                                             aux_y_, class_count_, cfg_.inner_epochs,
                                             cfg_.inner_learning_rate, cfg_.inner_optimizer);
    objective_log_.push_back(std::move(values));
  }

  ValueId Apply(Tape& tape, ValueId embedding) const override {
    ValueId pert = MlpForward(generator_.spec, generator_.params, tape, embedding);
    return ConcatCols(tape, embedding, pert);
  }

  const PerturbationGenerator& generator() const { return generator_; }
  const std::vector<std::vector<double>>& objective_log() const { return objective_log_; }

 private:
  PerturbationGenerator generator_;
  Tensor2 aux_x_;
  std::vector<int> aux_y_;
  int class_count_;
  ExtensionConfig cfg_;
  std::vector<std::vector<double>> objective_log_;
};

// Applies a fitted generator without refitting; used to evaluate a model
// trained under the extension attack.
class FrozenExtension : public UploadTransform {
 public:
  explicit FrozenExtension(PerturbationGenerator generator)
      : generator_(std::move(generator)) {}

  std::size_t ExtraWidth() const override { return generator_.width(); }
  void OnEpochStart(const MlpSpec&, const MlpParams&) override {}
  ValueId Apply(Tape& tape, ValueId embedding) const override {
    ValueId pert = MlpForward(generator_.spec, generator_.params, tape, embedding);
    return ConcatCols(tape, embedding, pert);
  }

 private:
  PerturbationGenerator generator_;
};

struct ExtensionRun {
  TrainHistory history;
  PerturbationGenerator generator;
  CutTrace trace;
  std::vector<std::vector<double>> generator_objective;
};

// Discorloss training with a client that extends its uploads. `model` must
// have been built with client_extension == ecfg.width.
inline ExtensionRun RunExtensionAttackTraining(
    SplitModel& model, const PartyData& train, const PartyData* validation,
    const DiscorlossConfig& dcfg, const TrainConfig& cfg, const Tensor2& aux_x,
    std::span<const int> aux_y, const ExtensionConfig& ecfg, Rng& rng,
    std::size_t trace_limit = 0) {
  if (!(dcfg.lambda > 0.0)) {
    throw ContractError("extension attack: the host must run Discorloss with lambda > 0");
  }
  const int classes = train.host.class_count;
  EmbeddingExtension extension(
      PerturbationGenerator::Create(model.cut_dim(), ecfg.width, rng), aux_x,
      std::vector<int>(aux_y.begin(), aux_y.end()), classes, ecfg);
  if (model.client_upload_width() != model.cut_dim() + extension.ExtraWidth()) {
    throw ProtocolError("extension attack: top model expects a " +
                        std::to_string(model.client_upload_width()) +
                        "-wide client upload, client sends " +
                        std::to_string(model.cut_dim() + extension.ExtraWidth()));
  }
  ExtensionRun run;
  run.history = TrainDiscorloss(model, train, validation, dcfg, cfg, &extension);
  DiscorlossObjective objective(dcfg);
  run.trace = RecordCutTrace(model, train, trace_limit, &objective, &extension,
                             cfg.epochs);
  run.generator = extension.generator();
  run.generator_objective = extension.objective_log();
  return run;
}

struct PearsonDimension {
  std::string label;  // E01.. for embedding columns, P01.. for perturbation
  double r = 0.0;
  bool zero_variance = false;
};

inline std::vector<PearsonDimension> PearsonDiagnostic(const Tensor2& embedding,
                                                       std::span<const int> labels,
                                                       std::size_t perturbation_width) {
  if (embedding.rows() == 0) throw ContractError("pearson diagnostic: empty trace");
  if (perturbation_width > embedding.cols()) {
    throw DimensionError("pearson diagnostic: perturbation wider than the trace");
  }
  PearsonResult pr = PearsonPerDimension(embedding, labels);
  const std::size_t base = embedding.cols() - perturbation_width;
  std::vector<PearsonDimension> out;
  for (std::size_t c = 0; c < embedding.cols(); ++c) {
    std::string label = c < base ? fmt::format("E{:02d}", c + 1)
                                 : fmt::format("P{:02d}", c - base + 1);
    if (pr.zero_variance[c]) spdlog::warn("pearson diagnostic: {} is constant", label);
    out.push_back({label, pr.r[c], pr.zero_variance[c]});
  }
  return out;
}

inline std::vector<PearsonDimension> PearsonDiagnostic(const CutTrace& trace,
                                                       std::size_t perturbation_width) {
  return PearsonDiagnostic(trace.client_embedding, trace.labels, perturbation_width);
}

}  // namespace vflsim

#endif  // VFLSIM_ATTACK_HPP_
