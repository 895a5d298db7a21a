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

#ifndef VFLSIM_NDCORE_OPTIM_HPP_
#define VFLSIM_NDCORE_OPTIM_HPP_

#include <cmath>
#include <string>

#include "vflsim/errors.hpp"
#include "vflsim/ndcore/mlp.hpp"

namespace vflsim {

enum class OptimizerKind { kSgd, kAdam };

inline OptimizerKind ParseOptimizerKind(const std::string& s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + s + "' (expected sgd or adam)");
}

inline const char* OptimizerName(OptimizerKind k) {
  return k == OptimizerKind::kSgd ? "sgd" : "adam";
}

struct OptimState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  OptimizerKind kind = OptimizerKind::kSgd;
  double learning_rate = 0.01;
  // Adam moments; empty for sgd.
  MlpParams first_moment;
  MlpParams second_moment;
  long step = 0;

  static OptimState Create(OptimizerKind kind, double learning_rate,
                           const MlpParams& like) {
    if (!(learning_rate > 0.0)) {
      throw ContractError("learning rate must be positive");
    }
    OptimState s;
    s.kind = kind;
    s.learning_rate = learning_rate;
    if (kind == OptimizerKind::kAdam) {
      s.first_moment = like.ZerosLike();
      s.second_moment = like.ZerosLike();
    }
    return s;
  }
};

namespace detail {

inline void SgdUpdate(Tensor2& p, const Tensor2& g, double lr) {
  for (std::size_t i = 0; i < p.size(); ++i) p.values()[i] -= lr * g.values()[i];
}

inline void AdamUpdate(Tensor2& p, const Tensor2& g, Tensor2& m, Tensor2& v,
                       double lr, double bc1, double bc2) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gi = g.values()[i];
    double& mi = m.values()[i];
    double& vi = v.values()[i];
    mi = OptimState::kBeta1 * mi + (1.0 - OptimState::kBeta1) * gi;
    vi = OptimState::kBeta2 * vi + (1.0 - OptimState::kBeta2) * gi * gi;
    const double mhat = mi / bc1;
    const double vhat = vi / bc2;
    p.values()[i] -= lr * mhat / (std::sqrt(vhat) + OptimState::kEpsilon);
  }
}

}  // namespace detail

// One descent step in place. sgd: p -= lr * g. adam: bias-corrected Adam.
inline void OptimStep(MlpParams& params, const MlpParams& grads,
                      OptimState& state) {
  if (!params.ShapesMatch(grads)) {
    throw ContractError("OptimStep: gradient shapes do not mirror parameters");
  }
  if (state.kind == OptimizerKind::kSgd) {
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      detail::SgdUpdate(params.layers[l].weight, grads.layers[l].weight,
                        state.learning_rate);
      detail::SgdUpdate(params.layers[l].bias, grads.layers[l].bias,
                        state.learning_rate);
    }
    return;
  }
  if (!params.ShapesMatch(state.first_moment)) {
    throw ContractError("OptimStep: adam moments do not mirror parameters");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(OptimState::kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(OptimState::kBeta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    detail::AdamUpdate(params.layers[l].weight, grads.layers[l].weight,
                       state.first_moment.layers[l].weight,
                       state.second_moment.layers[l].weight,
                       state.learning_rate, bc1, bc2);
    detail::AdamUpdate(params.layers[l].bias, grads.layers[l].bias,
                       state.first_moment.layers[l].bias,
                       state.second_moment.layers[l].bias,
                       state.learning_rate, bc1, bc2);
  }
}

}  // namespace vflsim

#endif  // VFLSIM_NDCORE_OPTIM_HPP_
