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

#ifndef VFLSIM_NDCORE_GRAD_CHECK_HPP_
#define VFLSIM_NDCORE_GRAD_CHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "vflsim/errors.hpp"
#include "vflsim/ndcore/tape.hpp"

namespace vflsim {

// A scalar-valued program: given a tape and the id of the input leaf, records
// a computation and returns the id of its 1x1 result.
using ScalarProgram = std::function<ValueId(Tape&, ValueId)>;

// Compares the tape gradient of `program` at `point` with central
// differences. Returns max_i |analytic_i - numeric_i| / max(1, |analytic_i|).
inline double GradCheck(const ScalarProgram& program, const Tensor2& point,
                        double epsilon = 1e-6) {
  if (!(epsilon > 0.0 && epsilon <= 1e-3)) {
    throw ContractError("GradCheck: epsilon must lie in (0, 1e-3]");
  }
  Tensor2 analytic;
  {
    Tape tape;
    ValueId x = tape.Variable(point);
    ValueId y = program(tape, x);
    tape.Backward(y);
    analytic = tape.grad(x);
  }
  auto evaluate = [&](const Tensor2& at) {
    Tape tape;
    ValueId x = tape.Leaf(at);
    double v = tape.value(program(tape, x)).item();
    if (!std::isfinite(v)) throw NumericError("GradCheck: non-finite objective");
    return v;
  };
  double worst = 0.0;
  Tensor2 probe = point;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double original = point.values()[i];
    probe.values()[i] = original + epsilon;
    const double up = evaluate(probe);
    probe.values()[i] = original - epsilon;
    const double down = evaluate(probe);
    probe.values()[i] = original;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double a = analytic.values()[i];
    worst = std::max(worst, std::abs(a - numeric) / std::max(1.0, std::abs(a)));
  }
  return worst;
}

}  // namespace vflsim

#endif  // VFLSIM_NDCORE_GRAD_CHECK_HPP_
