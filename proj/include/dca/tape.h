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

#ifndef DCA_TAPE_H_
#define DCA_TAPE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dca/matrix.h"

namespace dca {

class Tape;

// Handle to one recorded value on a Tape. Cheap to copy; only valid while
// the owning tape is alive.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

// Reverse-mode differentiation record. Every primitive appends one entry
// holding its operands, its output and the rules to recompute the output
// and to push gradients back to the operands. A tape is single-threaded;
// run independent tapes for parallel work.
class Tape {
 public:
  using Inputs = std::span<const Matrix* const>;
  using ForwardRule = std::function<Matrix(Inputs)>;
  // Accumulates (+=) into each non-null input gradient.
  using BackwardRule =
      std::function<void(Inputs inputs, const Matrix& output,
                         const Matrix& grad_output,
                         std::span<Matrix* const> input_grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // A differentiable input.
  Var Leaf(Matrix value);
  // A non-differentiable input.
  Var Constant(Matrix value);

  Var Record(std::string op, std::vector<Var> inputs, ForwardRule forward,
             BackwardRule backward);

  const Matrix& value(Var v) const;
  // Gradient of the last Backward() output wrt v; zeros when v does not
  // influence the output.
  Matrix grad(Var v) const;
  bool requires_grad(Var v) const;

  // Seeds d(output)/d(output) = 1 for a 1x1 output and walks entries in
  // reverse recording order.
  void Backward(Var output);

  // Recomputes every recorded entry from its forward rule and reports
  // whether all outputs are bit-identical to the recorded ones.
  bool Replay() const;

  // Entry ids in the order the last Backward() visited them.
  const std::vector<std::size_t>& last_backward_order() const {
    return backward_order_;
  }
  std::size_t size() const { return nodes_.size(); }
  const std::string& op_name(std::size_t id) const { return nodes_[id].op; }

 private:
  struct Node {
    std::string op;
    Matrix value;
    Matrix grad;
    std::vector<std::size_t> inputs;
    ForwardRule forward;
    BackwardRule backward;
    bool requires_grad = false;
  };

  void CheckOwned(Var v) const;

  std::vector<Node> nodes_;
  std::vector<std::size_t> backward_order_;
};

// Differentiable counterparts of the Matrix kernels.
Var MatMul(Var a, Var b);
Var Transpose(Var a);
Var Add(Var a, Var b);
Var Subtract(Var a, Var b);
Var Scale(Var a, double factor);
Var Hadamard(Var a, Var b);
Var Tanh(Var a);
Var Relu(Var a);
Var SoftmaxCols(Var a, double temperature = 1.0);
Var SoftmaxRows(Var a, double temperature = 1.0);
Var ConcatRows(Var a, Var b);
Var ConcatCols(Var a, Var b);
Var SliceRows(Var a, std::size_t begin, std::size_t count);
// Sum of all entries as a 1x1 value.
Var Sum(Var a);
// m + col broadcast across every column of m; col is m.rows() x 1.
Var AddColumnBroadcast(Var m, Var col);
// Broadcasts column `col` of g (L x K) into a rows x L matrix whose
// entry (r, l) is g(l, col).
Var ReplicateColumn(Var g, std::size_t col, std::size_t rows);
// sqrt(max(x, 0)) entrywise; the gradient is zero where the floor is active.
Var SafeSqrt(Var a);
// Scales each row (or column) to unit L2 norm. Throws numeric-domain on a
// zero-norm row (column).
Var NormalizeRows(Var a);
Var NormalizeCols(Var a);

}  // namespace dca

#endif  // DCA_TAPE_H_
