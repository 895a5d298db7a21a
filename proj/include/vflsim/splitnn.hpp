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

// Two-party SplitNN engine.
//
// The client owns its bottom model and features; the host owns its bottom
// model, the top model, its features and the labels. They interact only
// through UploadMessage (client -> host) and CutGradientMessage
// (host -> client). The concatenation order at the cut layer is always
// [client | host].

#ifndef VFLSIM_SPLITNN_HPP_
#define VFLSIM_SPLITNN_HPP_

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "vflsim/dataflow.hpp"
#include "vflsim/errors.hpp"
#include "vflsim/ndcore/mlp.hpp"
#include "vflsim/ndcore/optim.hpp"
#include "vflsim/ndcore/rng.hpp"
#include "vflsim/ndcore/tape.hpp"
#include "vflsim/stats.hpp"

namespace vflsim {

struct SplitArchitecture {
  std::vector<std::size_t> client_hidden{32};
  std::vector<std::size_t> host_hidden{32};
  std::vector<std::size_t> top_hidden{32};
  std::size_t cut_dim = 10;
};

struct SplitModel {
  MlpSpec client_spec;
  MlpParams client;
  MlpSpec host_spec;
  MlpParams host;
  MlpSpec top_spec;
  MlpParams top;

  std::size_t cut_dim() const { return client_spec.output_width(); }
  std::size_t output_width() const { return top_spec.output_width(); }
  // Width the top model expects from the client at the cut layer.
  std::size_t client_upload_width() const {
    return top_spec.input_width() - host_spec.output_width();
  }

  friend bool operator==(const SplitModel& a, const SplitModel& b) {
    return a.client == b.client && a.host == b.host && a.top == b.top;
  }
};

// Builds and initializes the three sub-networks. `client_extension` widens
// the top model's input for clients that upload extra columns.
inline SplitModel MakeSplitModel(std::size_t client_inputs, std::size_t host_inputs,
                                 std::size_t output_width,
                                 const SplitArchitecture& arch, Rng& rng,
                                 std::size_t client_extension = 0) {
  auto widths = [](std::size_t in, const std::vector<std::size_t>& hidden,
                   std::size_t out) {
    std::vector<std::size_t> w{in};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(out);
    return w;
  };
  SplitModel m;
  m.client_spec = {widths(client_inputs, arch.client_hidden, arch.cut_dim),
                   Activation::kRelu, Activation::kIdentity, "client_bottom"};
  m.host_spec = {widths(host_inputs, arch.host_hidden, arch.cut_dim),
                 Activation::kRelu, Activation::kIdentity, "host_bottom"};
  m.top_spec = {widths(2 * arch.cut_dim + client_extension, arch.top_hidden,
                       output_width),
                Activation::kRelu, Activation::kIdentity, "top"};
  Rng client_rng(rng.NextU64());
  Rng host_rng(rng.NextU64());
  Rng top_rng(rng.NextU64());
  m.client = MlpInit(m.client_spec, client_rng);
  m.host = MlpInit(m.host_spec, host_rng);
  m.top = MlpInit(m.top_spec, top_rng);
  return m;
}

// ---------------------------------------------------------------------------
// Extension points

// Client-side rewrite of the embedding before upload. Implementations append
// columns; the first cut_dim columns must stay the raw embedding.
class UploadTransform {
 public:
  virtual ~UploadTransform() = default;
  virtual std::size_t ExtraWidth() const = 0;
  // Called at the start of every training epoch with the current bottom.
  virtual void OnEpochStart(const MlpSpec& bottom_spec, const MlpParams& bottom) = 0;
  virtual ValueId Apply(Tape& tape, ValueId embedding) const = 0;
};

// What the host's loss gets to see for one batch.
struct HostBatch {
  std::span<const std::size_t> rows;
  const HostView* view = nullptr;
  // Random attribute values the client reported for these rows (may differ
  // from the ones it actually feeds its bottom model).
  std::span<const int> reported_client_rand;
};

// Host-side training objective and the matching decoder from top-model
// outputs to class predictions.
class HostObjective {
 public:
  virtual ~HostObjective() = default;
  virtual std::size_t OutputWidth(int class_count) const = 0;
  virtual std::size_t MinBatchSize() const { return 1; }
  virtual ValueId Loss(Tape& tape, ValueId prediction, ValueId client_upload,
                       const HostBatch& batch) const = 0;
  virtual int Decode(std::span<const double> output_row) const = 0;
};

// Index of the largest entry; ties go to the lowest index.
inline int ArgMax(std::span<const double> row) {
  int best = 0;
  for (std::size_t i = 1; i < row.size(); ++i)
    if (row[i] > row[best]) best = static_cast<int>(i);
  return best;
}

inline std::vector<int> GatherLabels(const std::vector<int>& labels,
                                     std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (std::size_t r : rows) out.push_back(labels[r]);
  return out;
}

class CrossEntropyObjective : public HostObjective {
 public:
  std::size_t OutputWidth(int class_count) const override { return class_count; }
  ValueId Loss(Tape& tape, ValueId prediction, ValueId /*client_upload*/,
               const HostBatch& batch) const override {
    std::vector<int> y = GatherLabels(batch.view->labels, batch.rows);
    return SoftmaxCrossEntropy(tape, prediction, y);
  }
  int Decode(std::span<const double> row) const override { return ArgMax(row); }
};

// ---------------------------------------------------------------------------
// Protocol messages and parties

struct UploadMessage {
  Tensor2 embedding;
  std::vector<int> reported_rand;  // empty when the client has no attribute
};

struct CutGradientMessage {
  Tensor2 gradient;  // d loss / d embedding, same shape as the upload
};

class ClientParty {
 public:
  ClientParty(const MlpSpec& spec, MlpParams& params, const ClientView& view,
              OptimState& optimizer, UploadTransform* transform = nullptr,
              const std::vector<int>* reported_rand = nullptr)
      : spec_(spec),
        params_(params),
        view_(view),
        optimizer_(optimizer),
        transform_(transform),
        reported_rand_(reported_rand != nullptr ? reported_rand : &view.rand) {
    if (view_.features.cols() != spec_.input_width()) {
      throw DimensionError("client: bottom model expects " +
                           std::to_string(spec_.input_width()) +
                           " input columns, client holds " +
                           std::to_string(view_.features.cols()));
    }
  }

  std::size_t upload_width() const {
    return spec_.output_width() + (transform_ ? transform_->ExtraWidth() : 0);
  }

  void BeginEpoch() {
    if (transform_) transform_->OnEpochStart(spec_, params_);
  }

  // Forward pass on the given rows, kept on a tape until ApplyGradient.
  UploadMessage Upload(std::span<const std::size_t> rows) {
    tape_.emplace();
    ValueId x = tape_->Leaf(view_.features.GatherRows(rows));
    output_ = MlpForward(spec_, params_, *tape_, x, &binding_);
    if (transform_) output_ = transform_->Apply(*tape_, output_);
    UploadMessage msg;
    msg.embedding = tape_->value(output_);
    if (!reported_rand_->empty()) msg.reported_rand = GatherLabels(*reported_rand_, rows);
    return msg;
  }

  // Backpropagates the host's cut-layer gradient and takes one step.
  void ApplyGradient(const CutGradientMessage& msg) {
    if (!tape_) throw ContractError("client: ApplyGradient without Upload");
    tape_->Backward(output_, msg.gradient);
    MlpParams grads = CollectGradients(*tape_, binding_);
    OptimStep(params_, grads, optimizer_);
    tape_.reset();
  }

  // Eval-mode upload for the given rows; no state changes.
  Tensor2 Embed(std::span<const std::size_t> rows) const {
    Tape tape;
    ValueId x = tape.Leaf(view_.features.GatherRows(rows));
    ValueId out = MlpForward(spec_, params_, tape, x);
    if (transform_) out = transform_->Apply(tape, out);
    return tape.value(out);
  }

 private:
  const MlpSpec& spec_;
  MlpParams& params_;
  const ClientView& view_;
  OptimState& optimizer_;
  UploadTransform* transform_;
  const std::vector<int>* reported_rand_;
  std::optional<Tape> tape_;
  ValueId output_;
  MlpBinding binding_;
};

class HostParty {
 public:
  HostParty(const MlpSpec& bottom_spec, MlpParams& bottom, const MlpSpec& top_spec,
            MlpParams& top, const HostView& view, const HostObjective& objective,
            OptimState& bottom_optimizer, OptimState& top_optimizer)
      : bottom_spec_(bottom_spec),
        bottom_(bottom),
        top_spec_(top_spec),
        top_(top),
        view_(view),
        objective_(objective),
        bottom_optimizer_(bottom_optimizer),
        top_optimizer_(top_optimizer) {
    if (view_.features.cols() != bottom_spec_.input_width()) {
      throw DimensionError("host: bottom model expects " +
                           std::to_string(bottom_spec_.input_width()) +
                           " input columns, host holds " +
                           std::to_string(view_.features.cols()));
    }
  }

  // Accepts the width the client declares, provided the top model was built
  // for it.
  void Negotiate(std::size_t client_width) const {
    if (client_width + bottom_spec_.output_width() != top_spec_.input_width()) {
      throw ProtocolError("host: client declares a " + std::to_string(client_width) +
                          "-wide upload but the top model takes " +
                          std::to_string(top_spec_.input_width() -
                                         bottom_spec_.output_width()));
    }
  }

  // One joint step: forward through host bottom and top, loss, backward,
  // update the host's models. Writes d loss / d upload into `reply`.
  double TrainStep(std::span<const std::size_t> rows, const UploadMessage& upload,
                   CutGradientMessage& reply) {
    Negotiate(upload.embedding.cols());
    Tape tape;
    ValueId vc = tape.Variable(upload.embedding);
    ValueId xh = tape.Leaf(view_.features.GatherRows(rows));
    MlpBinding bottom_binding, top_binding;
    ValueId vh = MlpForward(bottom_spec_, bottom_, tape, xh, &bottom_binding);
    ValueId out = MlpForward(top_spec_, top_, tape, ConcatCols(tape, vc, vh),
                             &top_binding);
    HostBatch batch{rows, &view_, upload.reported_rand};
    ValueId loss = objective_.Loss(tape, out, vc, batch);
    tape.Backward(loss);
    reply.gradient = tape.grad(vc);
    OptimStep(bottom_, CollectGradients(tape, bottom_binding), bottom_optimizer_);
    OptimStep(top_, CollectGradients(tape, top_binding), top_optimizer_);
    return tape.value(loss).item();
  }

  Tensor2 Outputs(std::span<const std::size_t> rows, const Tensor2& client_upload) const {
    Negotiate(client_upload.cols());
    Tape tape;
    ValueId vc = tape.Leaf(client_upload);
    ValueId vh = MlpForward(bottom_spec_, bottom_, tape,
                            tape.Leaf(view_.features.GatherRows(rows)));
    return tape.value(MlpForward(top_spec_, top_, tape, ConcatCols(tape, vc, vh)));
  }

 private:
  const MlpSpec& bottom_spec_;
  MlpParams& bottom_;
  const MlpSpec& top_spec_;
  MlpParams& top_;
  const HostView& view_;
  const HostObjective& objective_;
  OptimState& bottom_optimizer_;
  OptimState& top_optimizer_;
};

// ---------------------------------------------------------------------------
// Forward, prediction, evaluation

// f_t([f_bc(x_c) | f_bh(x_h)]) recorded on `tape`, with the optional client
// transform applied to the client embedding.
inline ValueId JointForward(const SplitModel& model, ValueId x_c, ValueId x_h,
                            Tape& tape, const UploadTransform* transform = nullptr) {
  if (tape.value(x_c).cols() != model.client_spec.input_width()) {
    throw DimensionError("joint_forward: client features have " +
                         std::to_string(tape.value(x_c).cols()) +
                         " columns, client bottom expects " +
                         std::to_string(model.client_spec.input_width()));
  }
  if (tape.value(x_h).cols() != model.host_spec.input_width()) {
    throw DimensionError("joint_forward: host features have " +
                         std::to_string(tape.value(x_h).cols()) +
                         " columns, host bottom expects " +
                         std::to_string(model.host_spec.input_width()));
  }
  ValueId vc = MlpForward(model.client_spec, model.client, tape, x_c);
  if (transform) vc = transform->Apply(tape, vc);
  ValueId vh = MlpForward(model.host_spec, model.host, tape, x_h);
  if (tape.value(vc).cols() + tape.value(vh).cols() != model.top_spec.input_width()) {
    throw ProtocolError("joint_forward: cut width " +
                        std::to_string(tape.value(vc).cols()) + " + " +
                        std::to_string(tape.value(vh).cols()) +
                        " does not match the top model input " +
                        std::to_string(model.top_spec.input_width()));
  }
  return MlpForward(model.top_spec, model.top, tape, ConcatCols(tape, vc, vh));
}

inline Tensor2 JointForward(const SplitModel& model, const Tensor2& x_c,
                            const Tensor2& x_h,
                            const UploadTransform* transform = nullptr) {
  Tape tape;
  ValueId c = tape.Leaf(x_c);
  ValueId h = tape.Leaf(x_h);
  return tape.value(JointForward(model, c, h, tape, transform));
}

inline std::vector<int> PredictLabels(const SplitModel& model, const Tensor2& x_c,
                                      const Tensor2& x_h,
                                      const HostObjective& objective,
                                      const UploadTransform* transform = nullptr) {
  Tensor2 out = JointForward(model, x_c, x_h, transform);
  std::vector<int> labels(out.rows());
  for (std::size_t r = 0; r < out.rows(); ++r) labels[r] = objective.Decode(out.row(r));
  return labels;
}

// Cross-entropy prediction: argmax with ties toward the lower class.
inline std::vector<int> Predict(const SplitModel& model, const Tensor2& x_c,
                                const Tensor2& x_h) {
  return PredictLabels(model, x_c, x_h, CrossEntropyObjective());
}

inline double EvaluateAccuracy(const SplitModel& model, const PartyData& data,
                               const HostObjective& objective,
                               const UploadTransform* transform = nullptr) {
  auto predicted = PredictLabels(model, data.client.features, data.host.features,
                                 objective, transform);
  return Accuracy(predicted, data.host.labels);
}

// ---------------------------------------------------------------------------
// Training

enum class LossMode { kCrossEntropy, kMseSoft };

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 128;
  double learning_rate = 0.05;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  LossMode loss_mode = LossMode::kCrossEntropy;
  std::uint64_t seed = 0;
  // When positive, a cut trace of this many train rows is kept per epoch.
  std::size_t trace_sample_limit = 0;

  void Validate() const {
    if (epochs < 0) throw ContractError("TrainConfig: epochs must be >= 0");
    if (batch_size < 2) throw ContractError("TrainConfig: batch_size must be >= 2");
    if (!(learning_rate > 0.0)) {
      throw ContractError("TrainConfig: learning_rate must be positive");
    }
  }
};

// Cut-layer snapshot: what crossed the cut for a set of rows.
struct CutTrace {
  int step = 0;
  std::vector<std::size_t> row_ids;
  Tensor2 client_embedding;  // as uploaded, including any extension columns
  Tensor2 host_embedding;
  Tensor2 client_gradient;   // empty when no objective was supplied
  std::vector<int> labels;   // ground truth, for offline analysis only

  std::size_t size() const { return row_ids.size(); }
};

struct TrainHistory {
  double initial_loss = 0.0;
  std::vector<double> train_loss;           // mean batch loss per epoch
  std::vector<double> validation_accuracy;  // after each epoch
  std::vector<CutTrace> traces;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> MakeBatches(
    std::vector<std::size_t> order, std::size_t batch_size, std::size_t min_batch) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    std::size_t end = std::min(order.size(), i + batch_size);
    batches.emplace_back(order.begin() + i, order.begin() + end);
  }
  if (batches.size() > 1 && batches.back().size() < min_batch) {
    auto tail = std::move(batches.back());
    batches.pop_back();
    batches.back().insert(batches.back().end(), tail.begin(), tail.end());
  }
  return batches;
}

}  // namespace detail

// Mean batch loss over `data` in row order, without updating anything.
inline double EvaluateLoss(const SplitModel& model, const PartyData& data,
                           const HostObjective& objective, std::size_t batch_size,
                           const UploadTransform* transform = nullptr) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  auto batches = detail::MakeBatches(order, batch_size, objective.MinBatchSize());
  double total = 0.0;
  std::vector<int> reported;
  for (const auto& rows : batches) {
    Tape tape;
    ValueId xc = tape.Leaf(data.client.features.GatherRows(rows));
    ValueId vc = MlpForward(model.client_spec, model.client, tape, xc);
    if (transform) vc = transform->Apply(tape, vc);
    ValueId xh = tape.Leaf(data.host.features.GatherRows(rows));
    ValueId vh = MlpForward(model.host_spec, model.host, tape, xh);
    ValueId out = MlpForward(model.top_spec, model.top, tape, ConcatCols(tape, vc, vh));
    reported = data.client.rand.empty() ? std::vector<int>{}
                                        : GatherLabels(data.client.rand, rows);
    HostBatch batch{rows, &data.host, reported};
    total += tape.value(objective.Loss(tape, out, vc, batch)).item();
  }
  return batches.empty() ? 0.0 : total / static_cast<double>(batches.size());
}

// Records the cut layer for the first `sample_limit` rows of `data` in eval
// mode. With an objective, also records d loss / d client upload.
inline CutTrace RecordCutTrace(const SplitModel& model, const PartyData& data,
                               std::size_t sample_limit,
                               const HostObjective* objective = nullptr,
                               const UploadTransform* transform = nullptr,
                               int step = 0) {
  CutTrace trace;
  trace.step = step;
  const std::size_t n = std::min(sample_limit, data.size());
  if (n == 0) return trace;
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0);
  Tape tape;
  ValueId xc = tape.Leaf(data.client.features.GatherRows(rows));
  ValueId vc = MlpForward(model.client_spec, model.client, tape, xc);
  if (transform) vc = transform->Apply(tape, vc);
  ValueId xh = tape.Leaf(data.host.features.GatherRows(rows));
  ValueId vh = MlpForward(model.host_spec, model.host, tape, xh);
  trace.client_embedding = tape.value(vc);
  trace.host_embedding = tape.value(vh);
  trace.labels = GatherLabels(data.host.labels, rows);
  for (std::size_t r : rows) {
    trace.row_ids.push_back(data.row_ids.empty() ? r : data.row_ids[r]);
  }
  if (objective != nullptr && n >= objective->MinBatchSize()) {
    Tape grad_tape;
    ValueId up = grad_tape.Variable(trace.client_embedding);
    ValueId h = grad_tape.Leaf(trace.host_embedding);
    ValueId out = MlpForward(model.top_spec, model.top, grad_tape,
                             ConcatCols(grad_tape, up, h));
    std::vector<int> reported =
        data.client.rand.empty() ? std::vector<int>{} : GatherLabels(data.client.rand, rows);
    HostBatch batch{rows, &data.host, reported};
    grad_tape.Backward(objective->Loss(grad_tape, out, up, batch));
    trace.client_gradient = grad_tape.grad(up);
  }
  return trace;
}

// Runs the two-party protocol for cfg.epochs epochs of shuffled minibatches.
// `reported_client_rand`, when given, replaces the attribute values the
// client reports to the host (its bottom model still sees the real ones).
inline TrainHistory TrainSplit(SplitModel& model, const PartyData& train,
                               const PartyData* validation, const TrainConfig& cfg,
                               const HostObjective& objective,
                               UploadTransform* transform = nullptr,
                               const std::vector<int>* reported_client_rand = nullptr) {
  cfg.Validate();
  const int classes = train.host.class_count;
  if (model.output_width() != objective.OutputWidth(classes)) {
    throw ContractError("TrainSplit: top model emits " +
                        std::to_string(model.output_width()) +
                        " outputs, objective needs " +
                        std::to_string(objective.OutputWidth(classes)));
  }
  if (cfg.batch_size < objective.MinBatchSize()) {
    throw ContractError("TrainSplit: batch_size below the objective's minimum");
  }
  OptimState client_opt = OptimState::Create(cfg.optimizer, cfg.learning_rate, model.client);
  OptimState host_opt = OptimState::Create(cfg.optimizer, cfg.learning_rate, model.host);
  OptimState top_opt = OptimState::Create(cfg.optimizer, cfg.learning_rate, model.top);
  ClientParty client(model.client_spec, model.client, train.client, client_opt,
                     transform, reported_client_rand);
  HostParty host(model.host_spec, model.host, model.top_spec, model.top, train.host,
                 objective, host_opt, top_opt);
  host.Negotiate(client.upload_width());

  TrainHistory history;
  if (cfg.epochs > 0) {
    history.initial_loss =
        EvaluateLoss(model, train, objective, cfg.batch_size, transform);
  }
  std::vector<std::size_t> order(train.size());
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(DeriveSeed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    client.BeginEpoch();
    auto batches = detail::MakeBatches(order, cfg.batch_size, objective.MinBatchSize());
    double total = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      try {
        UploadMessage up = client.Upload(batches[b]);
        CutGradientMessage reply;
        total += host.TrainStep(batches[b], up, reply);
        client.ApplyGradient(reply);
      } catch (const NumericError& e) {
        throw DivergenceError(e.what(), epoch, static_cast<long>(b));
      }
    }
    history.train_loss.push_back(total / static_cast<double>(batches.size()));
    if (validation != nullptr && validation->size() > 0) {
      history.validation_accuracy.push_back(
          EvaluateAccuracy(model, *validation, objective, transform));
    }
    if (cfg.trace_sample_limit > 0) {
      history.traces.push_back(RecordCutTrace(model, train, cfg.trace_sample_limit,
                                              &objective, transform, epoch + 1));
    }
  }
  return history;
}

// Undefended training on mean cross-entropy.
inline TrainHistory TrainPlain(SplitModel& model, const PartyData& train,
                               const PartyData* validation, const TrainConfig& cfg) {
  if (cfg.loss_mode != LossMode::kCrossEntropy) {
    throw ContractError("TrainPlain: loss mode must be cross_entropy");
  }
  return TrainSplit(model, train, validation, cfg, CrossEntropyObjective());
}

// Writes traces as CSV: step,row_id,party,dim_0..dim_k,true_label. Each
// trace contributes one row per sample for the client and one for the host;
// dims beyond a party's width are left empty.
inline void WriteEmbeddingDump(const std::string& path, std::span<const CutTrace> traces) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write embedding dump " + path);
  std::size_t width = 0;
  for (const auto& t : traces) {
    width = std::max({width, t.client_embedding.cols(), t.host_embedding.cols()});
  }
  out << "step,row_id,party";
  for (std::size_t d = 0; d < width; ++d) out << ",dim_" << d;
  out << ",true_label\n";
  auto emit = [&](const CutTrace& t, const char* party, const Tensor2& e) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      out << t.step << ',' << t.row_ids[i] << ',' << party;
      for (std::size_t d = 0; d < width; ++d) {
        out << ',';
        if (d < e.cols()) out << fmt::format("{}", e(i, d));
      }
      out << ',' << t.labels[i] << '\n';
    }
  };
  for (const auto& t : traces) {
    emit(t, "client", t.client_embedding);
    emit(t, "host", t.host_embedding);
  }
  if (!out) throw IoError("failed writing embedding dump " + path);
}

}  // namespace vflsim

#endif  // VFLSIM_SPLITNN_HPP_
