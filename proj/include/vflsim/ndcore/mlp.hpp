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

#ifndef VFLSIM_NDCORE_MLP_HPP_
#define VFLSIM_NDCORE_MLP_HPP_

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vflsim/errors.hpp"
#include "vflsim/ndcore/rng.hpp"
#include "vflsim/ndcore/tape.hpp"
#include "vflsim/ndcore/tensor.hpp"

namespace vflsim {

enum class Activation { kRelu, kIdentity };

// Layer widths from input to output. Hidden layers use `hidden_activation`,
// the last layer `output_activation`.
struct MlpSpec {
  std::vector<std::size_t> widths;
  Activation hidden_activation = Activation::kRelu;
  Activation output_activation = Activation::kIdentity;
  std::string name = "mlp";

  void Validate() const {
    if (widths.size() < 2) {
      throw ContractError("MlpSpec '" + name + "': need at least two widths");
    }
    for (std::size_t w : widths) {
      if (w == 0) throw ContractError("MlpSpec '" + name + "': zero width");
    }
  }

  std::size_t input_width() const { return widths.front(); }
  std::size_t output_width() const { return widths.back(); }
  std::size_t layer_count() const { return widths.size() - 1; }
};

struct DenseLayer {
  Tensor2 weight;  // fan_in x fan_out
  Tensor2 bias;    // 1 x fan_out
  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

// Parameters of one MLP. Also used as the container for its gradients and
// for optimizer moments, since those mirror the parameter shapes.
struct MlpParams {
  std::vector<DenseLayer> layers;
  friend bool operator==(const MlpParams&, const MlpParams&) = default;

  MlpParams ZerosLike() const {
    MlpParams out;
    for (const DenseLayer& l : layers) {
      out.layers.push_back({Tensor2(l.weight.rows(), l.weight.cols()),
                            Tensor2(l.bias.rows(), l.bias.cols())});
    }
    return out;
  }

  bool ShapesMatch(const MlpParams& other) const {
    if (layers.size() != other.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      if (!layers[i].weight.SameShape(other.layers[i].weight) ||
          !layers[i].bias.SameShape(other.layers[i].bias)) {
        return false;
      }
    }
    return true;
  }
};

// Weights uniform on [-sqrt(6/fan_in), sqrt(6/fan_in)], biases zero.
inline MlpParams MlpInit(const MlpSpec& spec, Rng& rng) {
  spec.Validate();
  MlpParams params;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const std::size_t fan_in = spec.widths[l];
    const std::size_t fan_out = spec.widths[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    Tensor2 w(fan_in, fan_out);
    for (double& v : w.values()) v = rng.Uniform(-bound, bound);
    params.layers.push_back({std::move(w), Tensor2(1, fan_out)});
  }
  return params;
}

// Tape ids of the parameter leaves created by one MlpForward call.
struct MlpBinding {
  std::vector<ValueId> weights;
  std::vector<ValueId> biases;
};

// Records the forward pass on `tape`. When `binding` is non-null the
// parameters become gradient-tracked leaves and their ids are stored there;
// otherwise they enter as constants.
inline ValueId MlpForward(const MlpSpec& spec, const MlpParams& params,
                          Tape& tape, ValueId input,
                          MlpBinding* binding = nullptr) {
  if (params.layers.size() != spec.layer_count()) {
    throw DimensionError("mlp '" + spec.name + "': " +
                         std::to_string(params.layers.size()) +
                         " parameter layers for a " +
                         std::to_string(spec.layer_count()) + "-layer spec");
  }
  if (binding != nullptr) {
    binding->weights.clear();
    binding->biases.clear();
  }
  ValueId h = input;
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const DenseLayer& layer = params.layers[l];
    const std::size_t have = tape.value(h).cols();
    if (have != layer.weight.rows()) {
      throw DimensionError("mlp '" + spec.name + "' layer " + std::to_string(l) +
                           ": expected input width " +
                           std::to_string(layer.weight.rows()) + ", got " +
                           std::to_string(have));
    }
    const bool track = binding != nullptr;
    ValueId w = tape.Leaf(layer.weight, track);
    ValueId b = tape.Leaf(layer.bias, track);
    if (track) {
      binding->weights.push_back(w);
      binding->biases.push_back(b);
    }
    h = Add(tape, MatMul(tape, h, w), b);
    const bool last = l + 1 == spec.layer_count();
    Activation act = last ? spec.output_activation : spec.hidden_activation;
    if (act == Activation::kRelu) h = Relu(tape, h);
  }
  return h;
}

// Gathers parameter gradients after Tape::Backward.
inline MlpParams CollectGradients(const Tape& tape, const MlpBinding& binding) {
  MlpParams grads;
  for (std::size_t l = 0; l < binding.weights.size(); ++l) {
    grads.layers.push_back({tape.grad(binding.weights[l]),
                            tape.grad(binding.biases[l])});
  }
  return grads;
}

// Forward pass without gradient bookkeeping.
inline Tensor2 MlpEval(const MlpSpec& spec, const MlpParams& params,
                       const Tensor2& input) {
  Tape tape;
  ValueId x = tape.Leaf(input);
  return tape.value(MlpForward(spec, params, tape, x));
}

}  // namespace vflsim

#endif  // VFLSIM_NDCORE_MLP_HPP_
