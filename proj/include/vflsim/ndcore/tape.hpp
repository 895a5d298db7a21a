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

// Reverse-mode differentiation over a fixed set of matrix primitives.
//
// A Tape records every primitive application in execution order, so the
// record is already topologically sorted: parents always precede children.
// Backward() walks it in reverse and accumulates adjoints. Nodes whose
// ancestors are all constants are marked as not requiring a gradient and are
// skipped entirely on the way back.

#ifndef VFLSIM_NDCORE_TAPE_HPP_
#define VFLSIM_NDCORE_TAPE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vflsim/errors.hpp"
#include "vflsim/ndcore/tensor.hpp"

namespace vflsim {

// Handle to a value recorded on a particular tape.
struct ValueId {
  std::size_t index = std::numeric_limits<std::size_t>::max();
  friend bool operator==(ValueId, ValueId) = default;
};

enum class OpKind {
  kLeaf,
  kMatMul,
  kAdd,  // second operand broadcasts: same shape, 1xC, Rx1 or 1x1
  kSub,
  kMul,
  kDiv,
  kScale,
  kRelu,
  kConcatCols,
  kSliceCols,
  kRowMean,  // RxC -> Rx1
  kColMean,  // RxC -> 1xC
  kMeanAll,  // RxC -> 1x1
  kSum,      // RxC -> 1x1
  kSqrtEps,
  kSqrt,
  kPairwiseSqDist,
  kSoftmaxCrossEntropy,
  kMse,
};

inline const char* OpName(OpKind op) {
  switch (op) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kDiv: return "div";
    case OpKind::kScale: return "scale";
    case OpKind::kRelu: return "relu";
    case OpKind::kConcatCols: return "concat_cols";
    case OpKind::kSliceCols: return "slice_cols";
    case OpKind::kRowMean: return "row_mean";
    case OpKind::kColMean: return "col_mean";
    case OpKind::kMeanAll: return "mean_all";
    case OpKind::kSum: return "sum";
    case OpKind::kSqrtEps: return "sqrt_eps";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kPairwiseSqDist: return "pairwise_sq_dist";
    case OpKind::kSoftmaxCrossEntropy: return "softmax_cross_entropy";
    case OpKind::kMse: return "mse";
  }
  return "?";
}

// Added under the square root in SqrtEps, and under the adjoint of Sqrt.
inline constexpr double kSqrtEpsilon = 1e-12;

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  ValueId Leaf(Tensor2 value, bool requires_grad = false) {
    Node node;
    node.op = OpKind::kLeaf;
    node.requires_grad = requires_grad;
    node.value = std::move(value);
    return Push(std::move(node));
  }

  // Convenience for a leaf that the caller wants a gradient for.
  ValueId Variable(Tensor2 value) { return Leaf(std::move(value), true); }

  const Tensor2& value(ValueId id) const { return At(id).value; }
  bool requires_grad(ValueId id) const { return At(id).requires_grad; }
  OpKind op(ValueId id) const { return At(id).op; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient of the last Backward() target with respect to `id`. Zeros when
  // the value is not reachable from it.
  Tensor2 grad(ValueId id) const {
    const Node& node = At(id);
    if (node.grad.empty()) return Tensor2(node.value.rows(), node.value.cols());
    return node.grad;
  }

  // Backpropagates from a 1x1 loss.
  void Backward(ValueId loss) {
    const Tensor2& v = value(loss);
    if (v.rows() != 1 || v.cols() != 1) {
      throw ContractError("Tape::Backward: loss must be 1x1, got " +
                          v.ShapeString());
    }
    Backward(loss, Tensor2::Scalar(1.0));
  }

  // Backpropagates an explicit upstream gradient (for example the cut-layer
  // gradient returned by the host) into the graph that produced `output`.
  void Backward(ValueId output, const Tensor2& seed) {
    const Node& out = At(output);
    if (!seed.SameShape(out.value)) {
      throw DimensionError("Tape::Backward: seed " + seed.ShapeString() +
                           " for a " + out.value.ShapeString() + " value");
    }
    for (Node& n : nodes_) n.grad = Tensor2();
    nodes_[output.index].grad = seed;
    for (std::size_t i = output.index + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.requires_grad || n.grad.empty() || n.op == OpKind::kLeaf) continue;
      Propagate(n);
    }
  }

  // -- Primitive recording. Use the free functions below instead. --

  ValueId Record(OpKind op, std::initializer_list<ValueId> parents,
                 Tensor2 value) {
    Node node;
    node.op = op;
    node.parent_count = 0;
    for (ValueId p : parents) {
      At(p);  // bounds check
      node.parents[node.parent_count++] = p;
      node.requires_grad = node.requires_grad || nodes_[p.index].requires_grad;
    }
    node.value = std::move(value);
    if (!node.value.AllFinite()) {
      throw NumericError(std::string("non-finite value produced by ") +
                         OpName(op));
    }
    return Push(std::move(node));
  }

  // Attaches op-specific cached data to the most recently recorded node.
  void SetAux(ValueId id, Tensor2 aux) { nodes_[id.index].aux = std::move(aux); }
  void SetAuxScalar(ValueId id, double s) { nodes_[id.index].aux_scalar = s; }
  void SetAuxRange(ValueId id, std::size_t a, std::size_t b) {
    nodes_[id.index].aux_begin = a;
    nodes_[id.index].aux_end = b;
  }
  void SetAuxLabels(ValueId id, std::vector<int> labels) {
    nodes_[id.index].aux_labels = std::move(labels);
  }

 private:
  struct Node {
    OpKind op = OpKind::kLeaf;
    std::array<ValueId, 2> parents{};
    int parent_count = 0;
    bool requires_grad = false;
    Tensor2 value;
    Tensor2 grad;
    // Op-specific cache: softmax probabilities, mse targets.
    Tensor2 aux;
    double aux_scalar = 0.0;
    std::size_t aux_begin = 0;
    std::size_t aux_end = 0;
    std::vector<int> aux_labels;
  };

  const Node& At(ValueId id) const {
    if (id.index >= nodes_.size()) {
      throw ContractError("ValueId " + std::to_string(id.index) +
                          " is not on this tape");
    }
    return nodes_[id.index];
  }

  ValueId Push(Node node) {
    nodes_.push_back(std::move(node));
    return ValueId{nodes_.size() - 1};
  }

  Tensor2* GradFor(ValueId id) {
    Node& p = nodes_[id.index];
    if (!p.requires_grad) return nullptr;
    if (p.grad.empty()) p.grad = Tensor2(p.value.rows(), p.value.cols());
    return &p.grad;
  }

  // Sums `g` (shaped like the result) down to the shape of a broadcast
  // operand and adds it into `dst`.
  static void AccumulateBroadcast(Tensor2& dst, const Tensor2& g,
                                  double sign = 1.0) {
    if (dst.SameShape(g)) {
      for (std::size_t i = 0; i < g.size(); ++i) dst.values()[i] += sign * g.values()[i];
      return;
    }
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) {
        std::size_t rr = dst.rows() == 1 ? 0 : r;
        std::size_t cc = dst.cols() == 1 ? 0 : c;
        dst(rr, cc) += sign * g(r, c);
      }
    }
  }

  static double BroadcastAt(const Tensor2& b, std::size_t r, std::size_t c) {
    return b(b.rows() == 1 ? 0 : r, b.cols() == 1 ? 0 : c);
  }

  void Propagate(Node& n) {
    const Tensor2& g = n.grad;
    const ValueId pa = n.parents[0];
    const ValueId pb = n.parents[1];
    switch (n.op) {
      case OpKind::kLeaf:
        return;
      case OpKind::kMatMul: {
        const Tensor2& a = nodes_[pa.index].value;
        const Tensor2& b = nodes_[pb.index].value;
        if (Tensor2* ga = GradFor(pa)) {
          // ga += g * b^T
          for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t k = 0; k < a.cols(); ++k) {
              double acc = 0.0;
              for (std::size_t j = 0; j < b.cols(); ++j) acc += g(i, j) * b(k, j);
              (*ga)(i, k) += acc;
            }
          }
        }
        if (Tensor2* gb = GradFor(pb)) {
          // gb += a^T * g
          for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t k = 0; k < a.cols(); ++k) {
              double aik = a(i, k);
              if (aik == 0.0) continue;
              auto grow = g.row(i);
              auto brow = gb->row(k);
              for (std::size_t j = 0; j < b.cols(); ++j) brow[j] += aik * grow[j];
            }
          }
        }
        return;
      }
      case OpKind::kAdd:
      case OpKind::kSub: {
        if (Tensor2* ga = GradFor(pa)) AccumulateBroadcast(*ga, g);
        if (Tensor2* gb = GradFor(pb)) {
          AccumulateBroadcast(*gb, g, n.op == OpKind::kAdd ? 1.0 : -1.0);
        }
        return;
      }
      case OpKind::kMul: {
        const Tensor2& a = nodes_[pa.index].value;
        const Tensor2& b = nodes_[pb.index].value;
        if (Tensor2* ga = GradFor(pa)) {
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c)
              (*ga)(r, c) += g(r, c) * BroadcastAt(b, r, c);
        }
        if (Tensor2* gb = GradFor(pb)) {
          Tensor2 local(g.rows(), g.cols());
          for (std::size_t i = 0; i < g.size(); ++i)
            local.values()[i] = g.values()[i] * a.values()[i];
          AccumulateBroadcast(*gb, local);
        }
        return;
      }
      case OpKind::kDiv: {
        const Tensor2& a = nodes_[pa.index].value;
        const Tensor2& b = nodes_[pb.index].value;
        if (Tensor2* ga = GradFor(pa)) {
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c)
              (*ga)(r, c) += g(r, c) / BroadcastAt(b, r, c);
        }
        if (Tensor2* gb = GradFor(pb)) {
          Tensor2 local(g.rows(), g.cols());
          for (std::size_t r = 0; r < g.rows(); ++r) {
            for (std::size_t c = 0; c < g.cols(); ++c) {
              double bv = BroadcastAt(b, r, c);
              local(r, c) = -g(r, c) * a(r, c) / (bv * bv);
            }
          }
          AccumulateBroadcast(*gb, local);
        }
        return;
      }
      case OpKind::kScale: {
        if (Tensor2* ga = GradFor(pa)) {
          for (std::size_t i = 0; i < g.size(); ++i)
            ga->values()[i] += n.aux_scalar * g.values()[i];
        }
        return;
      }
      case OpKind::kRelu: {
        const Tensor2& a = nodes_[pa.index].value;
        if (Tensor2* ga = GradFor(pa)) {
          for (std::size_t i = 0; i < g.size(); ++i)
            if (a.values()[i] > 0.0) ga->values()[i] += g.values()[i];
        }
        return;
      }
      case OpKind::kConcatCols: {
        const std::size_t left = nodes_[pa.index].value.cols();
        if (Tensor2* ga = GradFor(pa)) {
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < left; ++c) (*ga)(r, c) += g(r, c);
        }
        if (Tensor2* gb = GradFor(pb)) {
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = left; c < g.cols(); ++c) (*gb)(r, c - left) += g(r, c);
        }
        return;
      }
      case OpKind::kSliceCols: {
        if (Tensor2* ga = GradFor(pa)) {
          for (std::size_t r = 0; r < g.rows(); ++r)
            for (std::size_t c = 0; c < g.cols(); ++c)
              (*ga)(r, c + n.aux_begin) += g(r, c);
        }
        return;
      }
      case OpKind::kRowMean: {
        if (Tensor2* ga = GradFor(pa)) {
          const double inv = 1.0 / static_cast<double>(ga->cols());
          for (std::size_t r = 0; r < ga->rows(); ++r)
            for (std::size_t c = 0; c < ga->cols(); ++c) (*ga)(r, c) += g(r, 0) * inv;
        }
        return;
      }
      case OpKind::kColMean: {
        if (Tensor2* ga = GradFor(pa)) {
          const double inv = 1.0 / static_cast<double>(ga->rows());
          for (std::size_t r = 0; r < ga->rows(); ++r)
            for (std::size_t c = 0; c < ga->cols(); ++c) (*ga)(r, c) += g(0, c) * inv;
        }
        return;
      }
      case OpKind::kMeanAll:
      case OpKind::kSum: {
        if (Tensor2* ga = GradFor(pa)) {
          double s = g.item();
          if (n.op == OpKind::kMeanAll) s /= static_cast<double>(ga->size());
          for (double& v : ga->values()) v += s;
        }
        return;
      }
      case OpKind::kSqrtEps:
      case OpKind::kSqrt: {
        const Tensor2& a = nodes_[pa.index].value;
        if (Tensor2* ga = GradFor(pa)) {
          for (std::size_t i = 0; i < g.size(); ++i) {
            double x = a.values()[i];
            if (n.op == OpKind::kSqrt) x = std::max(x, 0.0);
            ga->values()[i] += g.values()[i] * 0.5 / std::sqrt(x + kSqrtEpsilon);
          }
        }
        return;
      }
      case OpKind::kPairwiseSqDist: {
        const Tensor2& x = nodes_[pa.index].value;
        if (Tensor2* gx = GradFor(pa)) {
          const std::size_t rows = x.rows();
          const std::size_t dims = x.cols();
          for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < rows; ++j) {
              if (i == j) continue;
              double w = 2.0 * (g(i, j) + g(j, i));
              if (w == 0.0) continue;
              for (std::size_t k = 0; k < dims; ++k)
                (*gx)(i, k) += w * (x(i, k) - x(j, k));
            }
          }
        }
        return;
      }
      case OpKind::kSoftmaxCrossEntropy: {
        if (Tensor2* ga = GradFor(pa)) {
          const Tensor2& probs = n.aux;
          const double s = g.item() / static_cast<double>(probs.rows());
          for (std::size_t r = 0; r < probs.rows(); ++r) {
            for (std::size_t c = 0; c < probs.cols(); ++c) {
              double target = static_cast<int>(c) == n.aux_labels[r] ? 1.0 : 0.0;
              (*ga)(r, c) += s * (probs(r, c) - target);
            }
          }
        }
        return;
      }
      case OpKind::kMse: {
        const Tensor2& pred = nodes_[pa.index].value;
        if (Tensor2* ga = GradFor(pa)) {
          const Tensor2& target = n.aux;
          const double s = 2.0 * g.item() / static_cast<double>(pred.size());
          for (std::size_t i = 0; i < pred.size(); ++i)
            ga->values()[i] += s * (pred.values()[i] - target.values()[i]);
        }
        return;
      }
    }
  }

  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Primitives. Each records one node with an analytic adjoint.

inline ValueId MatMul(Tape& tape, ValueId a, ValueId b) {
  const Tensor2& x = tape.value(a);
  const Tensor2& y = tape.value(b);
  if (x.cols() != y.rows()) {
    throw DimensionError("matmul: " + x.ShapeString() + " * " + y.ShapeString());
  }
  Tensor2 out(x.rows(), y.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto orow = out.row(i);
    for (std::size_t k = 0; k < x.cols(); ++k) {
      double xik = x(i, k);
      if (xik == 0.0) continue;
      auto yrow = y.row(k);
      for (std::size_t j = 0; j < y.cols(); ++j) orow[j] += xik * yrow[j];
    }
  }
  return tape.Record(OpKind::kMatMul, {a, b}, std::move(out));
}

namespace detail {

inline void CheckBroadcast(const char* name, const Tensor2& a, const Tensor2& b) {
  bool ok = a.SameShape(b) || (b.rows() == 1 && b.cols() == a.cols()) ||
            (b.cols() == 1 && b.rows() == a.rows()) ||
            (b.rows() == 1 && b.cols() == 1);
  if (!ok) {
    throw DimensionError(std::string(name) + ": cannot broadcast " +
                         b.ShapeString() + " onto " + a.ShapeString());
  }
}

template <typename F>
ValueId Elementwise(Tape& tape, OpKind op, const char* name, ValueId a,
                    ValueId b, F f) {
  const Tensor2& x = tape.value(a);
  const Tensor2& y = tape.value(b);
  CheckBroadcast(name, x, y);
  Tensor2 out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) {
      double yv = y(y.rows() == 1 ? 0 : r, y.cols() == 1 ? 0 : c);
      out(r, c) = f(x(r, c), yv);
    }
  }
  return tape.Record(op, {a, b}, std::move(out));
}

}  // namespace detail

// a + b, with b broadcast over rows and/or columns when it is 1xC, Rx1 or 1x1.
inline ValueId Add(Tape& tape, ValueId a, ValueId b) {
  return detail::Elementwise(tape, OpKind::kAdd, "add", a, b,
                             [](double x, double y) { return x + y; });
}

inline ValueId Sub(Tape& tape, ValueId a, ValueId b) {
  return detail::Elementwise(tape, OpKind::kSub, "sub", a, b,
                             [](double x, double y) { return x - y; });
}

inline ValueId Mul(Tape& tape, ValueId a, ValueId b) {
  return detail::Elementwise(tape, OpKind::kMul, "mul", a, b,
                             [](double x, double y) { return x * y; });
}

inline ValueId Div(Tape& tape, ValueId a, ValueId b) {
  return detail::Elementwise(tape, OpKind::kDiv, "div", a, b,
                             [](double x, double y) { return x / y; });
}

inline ValueId Scale(Tape& tape, ValueId a, double factor) {
  Tensor2 out = tape.value(a);
  for (double& v : out.values()) v *= factor;
  ValueId id = tape.Record(OpKind::kScale, {a}, std::move(out));
  tape.SetAuxScalar(id, factor);
  return id;
}

inline ValueId Relu(Tape& tape, ValueId a) {
  Tensor2 out = tape.value(a);
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return tape.Record(OpKind::kRelu, {a}, std::move(out));
}

inline ValueId ConcatCols(Tape& tape, ValueId a, ValueId b) {
  Tensor2 out = ConcatColumns(tape.value(a), tape.value(b));
  return tape.Record(OpKind::kConcatCols, {a, b}, std::move(out));
}

inline ValueId SliceCols(Tape& tape, ValueId a, std::size_t begin,
                         std::size_t end) {
  Tensor2 out = tape.value(a).SliceCols(begin, end);
  ValueId id = tape.Record(OpKind::kSliceCols, {a}, std::move(out));
  tape.SetAuxRange(id, begin, end);
  return id;
}

inline ValueId RowMean(Tape& tape, ValueId a) {
  const Tensor2& x = tape.value(a);
  if (x.cols() == 0) throw DimensionError("row_mean: no columns");
  Tensor2 out(x.rows(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double s = 0.0;
    for (double v : x.row(r)) s += v;
    out(r, 0) = s / static_cast<double>(x.cols());
  }
  return tape.Record(OpKind::kRowMean, {a}, std::move(out));
}

inline ValueId ColMean(Tape& tape, ValueId a) {
  const Tensor2& x = tape.value(a);
  if (x.rows() == 0) throw DimensionError("col_mean: no rows");
  Tensor2 out(1, x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) out(0, c) += x(r, c);
  for (double& v : out.values()) v /= static_cast<double>(x.rows());
  return tape.Record(OpKind::kColMean, {a}, std::move(out));
}

inline ValueId MeanAll(Tape& tape, ValueId a) {
  const Tensor2& x = tape.value(a);
  if (x.size() == 0) throw DimensionError("mean_all: empty tensor");
  double s = 0.0;
  for (double v : x.values()) s += v;
  return tape.Record(OpKind::kMeanAll, {a},
                     Tensor2::Scalar(s / static_cast<double>(x.size())));
}

inline ValueId Sum(Tape& tape, ValueId a) {
  double s = 0.0;
  for (double v : tape.value(a).values()) s += v;
  return tape.Record(OpKind::kSum, {a}, Tensor2::Scalar(s));
}

// sqrt(x + 1e-12): smooth everywhere on x >= 0.
inline ValueId SqrtEps(Tape& tape, ValueId a) {
  Tensor2 out = tape.value(a);
  for (double& v : out.values()) {
    if (v + kSqrtEpsilon < 0.0) throw NumericError("sqrt_eps of a negative value");
    v = std::sqrt(v + kSqrtEpsilon);
  }
  return tape.Record(OpKind::kSqrtEps, {a}, std::move(out));
}

// Exact sqrt(max(x, 0)) in the forward pass; the adjoint uses
// 0.5 / sqrt(x + 1e-12) so it stays finite at zero.
inline ValueId Sqrt(Tape& tape, ValueId a) {
  Tensor2 out = tape.value(a);
  for (double& v : out.values()) v = std::sqrt(std::max(v, 0.0));
  return tape.Record(OpKind::kSqrt, {a}, std::move(out));
}

// n x p -> n x n matrix of squared Euclidean row distances.
inline ValueId PairwiseSqDist(Tape& tape, ValueId a) {
  const Tensor2& x = tape.value(a);
  const std::size_t n = x.rows();
  Tensor2 out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.cols(); ++k) {
        double d = x(i, k) - x(j, k);
        s += d * d;
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return tape.Record(OpKind::kPairwiseSqDist, {a}, std::move(out));
}

// Mean softmax cross-entropy of n x C logits against integer labels.
inline ValueId SoftmaxCrossEntropy(Tape& tape, ValueId logits,
                                   std::span<const int> labels) {
  const Tensor2& z = tape.value(logits);
  if (labels.size() != z.rows()) {
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for " + z.ShapeString() + " logits");
  }
  if (z.rows() == 0) throw DimensionError("softmax_cross_entropy: empty batch");
  Tensor2 probs(z.rows(), z.cols());
  double loss = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= z.cols()) {
      throw ContractError("softmax_cross_entropy: label " + std::to_string(y) +
                          " outside [0, " + std::to_string(z.cols()) + ")");
    }
    auto row = z.row(r);
    double mx = *std::max_element(row.begin(), row.end());
    double denom = 0.0;
    for (double v : row) denom += std::exp(v - mx);
    for (std::size_t c = 0; c < z.cols(); ++c)
      probs(r, c) = std::exp(row[c] - mx) / denom;
    loss += std::log(denom) + mx - row[y];
  }
  ValueId id = tape.Record(OpKind::kSoftmaxCrossEntropy, {logits},
                           Tensor2::Scalar(loss / static_cast<double>(z.rows())));
  tape.SetAux(id, std::move(probs));
  tape.SetAuxLabels(id, std::vector<int>(labels.begin(), labels.end()));
  return id;
}

// Mean squared error against a constant target of the same shape.
inline ValueId Mse(Tape& tape, ValueId prediction, const Tensor2& target) {
  const Tensor2& p = tape.value(prediction);
  if (!p.SameShape(target)) {
    throw DimensionError("mse: prediction " + p.ShapeString() + " vs target " +
                         target.ShapeString());
  }
  if (p.size() == 0) throw DimensionError("mse: empty tensor");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double d = p.values()[i] - target.values()[i];
    s += d * d;
  }
  ValueId id = tape.Record(OpKind::kMse, {prediction},
                           Tensor2::Scalar(s / static_cast<double>(p.size())));
  tape.SetAux(id, target);
  return id;
}

}  // namespace vflsim

#endif  // VFLSIM_NDCORE_TAPE_HPP_
