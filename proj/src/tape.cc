// Copyright (c) 2026 DCA Verification Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dca/tape.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dca/error.h"

namespace dca {

namespace {

void Accumulate(Matrix* dst, const Matrix& src) {
  if (dst == nullptr) return;
  auto d = dst->mutable_data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Tape* SameTape(Var a, Var b) {
  if (a.tape == nullptr || a.tape != b.tape) {
    Fail(ErrorCode::kInvalidParameter, "operands recorded on different tapes");
  }
  return a.tape;
}

}  // namespace

const Matrix& Var::value() const {
  if (tape == nullptr) Fail(ErrorCode::kInvalidParameter, "unbound Var");
  return tape->value(*this);
}

Var Tape::Leaf(Matrix value) {
  Node node;
  node.op = "leaf";
  node.value = std::move(value);
  node.value.CheckFinite("leaf");
  node.requires_grad = true;
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Tape::Constant(Matrix value) {
  Node node;
  node.op = "constant";
  node.value = std::move(value);
  node.value.CheckFinite("constant");
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

Var Tape::Record(std::string op, std::vector<Var> inputs, ForwardRule forward,
                 BackwardRule backward) {
  Node node;
  node.op = std::move(op);
  std::vector<const Matrix*> operands;
  operands.reserve(inputs.size());
  for (Var v : inputs) {
    CheckOwned(v);
    node.inputs.push_back(v.id);
    node.requires_grad = node.requires_grad || nodes_[v.id].requires_grad;
    operands.push_back(&nodes_[v.id].value);
  }
  node.value = forward(operands);
  node.value.CheckFinite(node.op.c_str());
  node.forward = std::move(forward);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var{this, nodes_.size() - 1};
}

void Tape::CheckOwned(Var v) const {
  if (v.tape != this || v.id >= nodes_.size()) {
    Fail(ErrorCode::kInvalidParameter, "Var does not belong to this tape");
  }
}

const Matrix& Tape::value(Var v) const {
  CheckOwned(v);
  return nodes_[v.id].value;
}

Matrix Tape::grad(Var v) const {
  CheckOwned(v);
  const Node& node = nodes_[v.id];
  if (node.grad.empty()) return Matrix(node.value.rows(), node.value.cols());
  return node.grad;
}

bool Tape::requires_grad(Var v) const {
  CheckOwned(v);
  return nodes_[v.id].requires_grad;
}

void Tape::Backward(Var output) {
  CheckOwned(output);
  const Matrix& out = nodes_[output.id].value;
  if (out.rows() != 1 || out.cols() != 1) {
    Fail(ErrorCode::kInvalidShape,
         "backward needs a scalar output, got " + out.ShapeString());
  }
  for (Node& node : nodes_) {
    node.grad = node.requires_grad ? Matrix(node.value.rows(), node.value.cols())
                                   : Matrix();
  }
  backward_order_.clear();
  if (!nodes_[output.id].requires_grad) return;
  nodes_[output.id].grad(0, 0) = 1.0;

  std::vector<const Matrix*> operands;
  std::vector<Matrix*> operand_grads;
  for (std::size_t id = output.id + 1; id-- > 0;) {
    Node& node = nodes_[id];
    backward_order_.push_back(id);
    if (!node.requires_grad || !node.backward) continue;
    operands.clear();
    operand_grads.clear();
    for (std::size_t in : node.inputs) {
      operands.push_back(&nodes_[in].value);
      operand_grads.push_back(nodes_[in].requires_grad ? &nodes_[in].grad
                                                        : nullptr);
    }
    node.backward(operands, node.value, node.grad, operand_grads);
    for (Matrix* g : operand_grads) {
      if (g != nullptr) g->CheckFinite(node.op.c_str());
    }
  }
}

bool Tape::Replay() const {
  std::vector<const Matrix*> operands;
  for (const Node& node : nodes_) {
    if (!node.forward) continue;
    operands.clear();
    for (std::size_t in : node.inputs) operands.push_back(&nodes_[in].value);
    if (!(node.forward(operands) == node.value)) return false;
  }
  return true;
}

Var MatMul(Var a, Var b) {
  return SameTape(a, b)->Record(
      "matmul", {a, b},
      [](Tape::Inputs in) { return MatMul(*in[0], *in[1]); },
      [](Tape::Inputs in, const Matrix&, const Matrix& g,
         std::span<Matrix* const> grads) {
        if (grads[0]) Accumulate(grads[0], MatMul(g, Transpose(*in[1])));
        if (grads[1]) Accumulate(grads[1], MatMul(Transpose(*in[0]), g));
      });
}

Var Transpose(Var a) {
  return a.tape->Record(
      "transpose", {a}, [](Tape::Inputs in) { return Transpose(*in[0]); },
      [](Tape::Inputs, const Matrix&, const Matrix& g,
         std::span<Matrix* const> grads) { Accumulate(grads[0], Transpose(g)); });
}

Var Add(Var a, Var b) {
  return SameTape(a, b)->Record(
      "add", {a, b}, [](Tape::Inputs in) { return Add(*in[0], *in[1]); },
      [](Tape::Inputs, const Matrix&, const Matrix& g,
         std::span<Matrix* const> grads) {
        Accumulate(grads[0], g);
        Accumulate(grads[1], g);
      });
}

Var Subtract(Var a, Var b) {
  return SameTape(a, b)->Record(
      "subtract", {a, b},
      [](Tape::Inputs in) { return Subtract(*in[0], *in[1]); },
      [](Tape::Inputs, const Matrix&, const Matrix& g,
         std::span<Matrix* const> grads) {
        Accumulate(grads[0], g);
        if (grads[1]) Accumulate(grads[1], Scale(g, -1.0));
      });
}

Var Scale(Var a, double factor) {
  return a.tape->Record(
      "scale", {a},
      [factor](Tape::Inputs in) { return Scale(*in[0], factor); },
      [factor](Tape::Inputs, const Matrix&, const Matrix& g,
               std::span<Matrix* const> grads) {
        Accumulate(grads[0], Scale(g, factor));
      });
}

Var Hadamard(Var a, Var b) {
  return SameTape(a, b)->Record(
      "hadamard", {a, b},
      [](Tape::Inputs in) { return Hadamard(*in[0], *in[1]); },
      [](Tape::Inputs in, const Matrix&, const Matrix& g,
         std::span<Matrix* const> grads) {
        if (grads[0]) Accumulate(grads[0], Hadamard(g, *in[1]));
        if (grads[1]) Accumulate(grads[1], Hadamard(g, *in[0]));
      });
}

Var Tanh(Var a) {
  return a.tape->Record(
      "tanh", {a}, [](Tape::Inputs in) { return Tanh(*in[0]); },
      [](Tape::Inputs, const Matrix& y, const Matrix& g,
         std::span<Matrix* const> grads) {
        auto dst = grads[0]->mutable_data();
        for (std::size_t i = 0; i < dst.size(); ++i) {
          const double yi = y.data()[i];
          dst[i] += g.data()[i] * (1.0 - yi * yi);
        }
      });
}

Var Relu(Var a) {
  return a.tape->Record(
      "relu", {a}, [](Tape::Inputs in) { return Relu(*in[0]); },
      [](Tape::Inputs in, const Matrix&, const Matrix& g,
         std::span<Matrix* const> grads) {
        auto dst = grads[0]->mutable_data();
        for (std::size_t i = 0; i < dst.size(); ++i) {
          if (in[0]->data()[i] > 0.0) dst[i] += g.data()[i];
        }
      });
}

Var SoftmaxCols(Var a, double temperature) {
  return a.tape->Record(
      "softmax_cols", {a},
      [temperature](Tape::Inputs in) {
        return SoftmaxCols(*in[0], temperature);
      },
      [temperature](Tape::Inputs, const Matrix& y, const Matrix& g,
                    std::span<Matrix* const> grads) {
        Matrix& dst = *grads[0];
        for (std::size_t c = 0; c < y.cols(); ++c) {
          double dot = 0.0;
          for (std::size_t r = 0; r < y.rows(); ++r) dot += g(r, c) * y(r, c);
          for (std::size_t r = 0; r < y.rows(); ++r)
            dst(r, c) += y(r, c) * (g(r, c) - dot) / temperature;
        }
      });
}

Var SoftmaxRows(Var a, double temperature) {
  return a.tape->Record(
      "softmax_rows", {a},
      [temperature](Tape::Inputs in) {
        return SoftmaxRows(*in[0], temperature);
      },
      [temperature](Tape::Inputs, const Matrix& y, const Matrix& g,
                    std::span<Matrix* const> grads) {
        Matrix& dst = *grads[0];
        for (std::size_t r = 0; r < y.rows(); ++r) {
          double dot = 0.0;
          for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
          for (std::size_t c = 0; c < y.cols(); ++c)
            dst(r, c) += y(r, c) * (g(r, c) - dot) / temperature;
        }
      });
}

Var ConcatRows(Var a, Var b) {
  const std::size_t top = a.rows();
  return SameTape(a, b)->Record(
      "concat_rows", {a, b},
      [](Tape::Inputs in) { return ConcatRows(*in[0], *in[1]); },
      [top](Tape::Inputs in, const Matrix&, const Matrix& g,
            std::span<Matrix* const> grads) {
        if (grads[0]) Accumulate(grads[0], SliceRows(g, 0, top));
        if (grads[1])
          Accumulate(grads[1], SliceRows(g, top, in[1]->rows()));
      });
}

Var ConcatCols(Var a, Var b) {
  const std::size_t left = a.cols();
  return SameTape(a, b)->Record(
      "concat_cols", {a, b},
      [](Tape::Inputs in) { return ConcatCols(*in[0], *in[1]); },
      [left](Tape::Inputs, const Matrix&, const Matrix& g,
             std::span<Matrix* const> grads) {
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < g.cols(); ++c) {
            if (c < left) {
              if (grads[0]) (*grads[0])(r, c) += g(r, c);
            } else if (grads[1]) {
              (*grads[1])(r, c - left) += g(r, c);
            }
          }
        }
      });
}

Var SliceRows(Var a, std::size_t begin, std::size_t count) {
  return a.tape->Record(
      "slice_rows", {a},
      [begin, count](Tape::Inputs in) {
        return SliceRows(*in[0], begin, count);
      },
      [begin](Tape::Inputs, const Matrix&, const Matrix& g,
              std::span<Matrix* const> grads) {
        Matrix& dst = *grads[0];
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < g.cols(); ++c) dst(begin + r, c) += g(r, c);
      });
}

Var Sum(Var a) {
  return a.tape->Record(
      "sum", {a}, [](Tape::Inputs in) { return Matrix(1, 1, Sum(*in[0])); },
      [](Tape::Inputs, const Matrix&, const Matrix& g,
         std::span<Matrix* const> grads) {
        for (double& v : grads[0]->mutable_data()) v += g(0, 0);
      });
}

Var AddColumnBroadcast(Var m, Var col) {
  if (col.cols() != 1 || col.rows() != m.rows()) {
    Fail(ErrorCode::kInvalidShape, "add_column_broadcast: column " +
                                       col.value().ShapeString() +
                                       " does not fit " +
                                       m.value().ShapeString());
  }
  return SameTape(m, col)->Record(
      "add_column_broadcast", {m, col},
      [](Tape::Inputs in) {
        Matrix out = *in[0];
        for (std::size_t r = 0; r < out.rows(); ++r)
          for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += (*in[1])(r, 0);
        out.CheckFinite("add_column_broadcast");
        return out;
      },
      [](Tape::Inputs, const Matrix&, const Matrix& g,
         std::span<Matrix* const> grads) {
        Accumulate(grads[0], g);
        if (grads[1]) {
          for (std::size_t r = 0; r < g.rows(); ++r) {
            double total = 0.0;
            for (std::size_t c = 0; c < g.cols(); ++c) total += g(r, c);
            (*grads[1])(r, 0) += total;
          }
        }
      });
}

Var ReplicateColumn(Var g, std::size_t col, std::size_t rows) {
  if (col >= g.cols() || rows == 0) {
    Fail(ErrorCode::kInvalidShape,
         "replicate_column: column " + std::to_string(col) +
             " out of range for " + g.value().ShapeString());
  }
  return g.tape->Record(
      "replicate_column", {g},
      [col, rows](Tape::Inputs in) {
        const Matrix& src = *in[0];
        Matrix out(rows, src.rows());
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t l = 0; l < src.rows(); ++l) out(r, l) = src(l, col);
        return out;
      },
      [col](Tape::Inputs, const Matrix&, const Matrix& grad_out,
            std::span<Matrix* const> grads) {
        for (std::size_t l = 0; l < grad_out.cols(); ++l) {
          double total = 0.0;
          for (std::size_t r = 0; r < grad_out.rows(); ++r) total += grad_out(r, l);
          (*grads[0])(l, col) += total;
        }
      });
}

Var SafeSqrt(Var a) {
  return a.tape->Record(
      "safe_sqrt", {a},
      [](Tape::Inputs in) {
        Matrix out(in[0]->rows(), in[0]->cols());
        for (std::size_t i = 0; i < out.size(); ++i)
          out.mutable_data()[i] = std::sqrt(std::max(in[0]->data()[i], 0.0));
        return out;
      },
      [](Tape::Inputs, const Matrix& y, const Matrix& g,
         std::span<Matrix* const> grads) {
        auto dst = grads[0]->mutable_data();
        for (std::size_t i = 0; i < dst.size(); ++i) {
          const double yi = y.data()[i];
          if (yi > 0.0) dst[i] += g.data()[i] / (2.0 * yi);
        }
      });
}

namespace {

// Normalizes the vectors of a matrix along one axis; `by_rows` picks rows.
Matrix NormalizeAxis(const Matrix& m, bool by_rows) {
  Matrix out = m;
  const std::size_t outer = by_rows ? m.rows() : m.cols();
  const std::size_t inner = by_rows ? m.cols() : m.rows();
  for (std::size_t o = 0; o < outer; ++o) {
    double sq = 0.0;
    for (std::size_t i = 0; i < inner; ++i) {
      const double v = by_rows ? m(o, i) : m(i, o);
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0)) {
      Fail(ErrorCode::kNumericDomain, "cannot normalize a zero-norm vector");
    }
    for (std::size_t i = 0; i < inner; ++i) {
      double& v = by_rows ? out(o, i) : out(i, o);
      v /= norm;
    }
  }
  return out;
}

void NormalizeAxisBackward(const Matrix& x, const Matrix& y, const Matrix& g,
                           Matrix* dx, bool by_rows) {
  const std::size_t outer = by_rows ? x.rows() : x.cols();
  const std::size_t inner = by_rows ? x.cols() : x.rows();
  for (std::size_t o = 0; o < outer; ++o) {
    double sq = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < inner; ++i) {
      const double xv = by_rows ? x(o, i) : x(i, o);
      sq += xv * xv;
      dot += by_rows ? y(o, i) * g(o, i) : y(i, o) * g(i, o);
    }
    const double norm = std::sqrt(sq);
    for (std::size_t i = 0; i < inner; ++i) {
      const double yv = by_rows ? y(o, i) : y(i, o);
      const double gv = by_rows ? g(o, i) : g(i, o);
      double& d = by_rows ? (*dx)(o, i) : (*dx)(i, o);
      d += (gv - yv * dot) / norm;
    }
  }
}

}  // namespace

Var NormalizeRows(Var a) {
  return a.tape->Record(
      "normalize_rows", {a},
      [](Tape::Inputs in) { return NormalizeAxis(*in[0], true); },
      [](Tape::Inputs in, const Matrix& y, const Matrix& g,
         std::span<Matrix* const> grads) {
        NormalizeAxisBackward(*in[0], y, g, grads[0], true);
      });
}

Var NormalizeCols(Var a) {
  return a.tape->Record(
      "normalize_cols", {a},
      [](Tape::Inputs in) { return NormalizeAxis(*in[0], false); },
      [](Tape::Inputs in, const Matrix& y, const Matrix& g,
         std::span<Matrix* const> grads) {
        NormalizeAxisBackward(*in[0], y, g, grads[0], false);
      });
}

}  // namespace dca
