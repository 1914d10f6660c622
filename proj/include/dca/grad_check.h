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

#ifndef DCA_GRAD_CHECK_H_
#define DCA_GRAD_CHECK_H_

#include <functional>

#include "dca/matrix.h"
#include "dca/tape.h"

namespace dca {

// Builds a scalar (1x1) graph on `tape` from the differentiable input `x`.
using ScalarGraph = std::function<Var(Tape& tape, Var x)>;

// Largest |analytic - central difference| / max(1, |central difference|)
// over the entries of x. Throws numeric-domain if f is not finite at x or
// at one of the +-h perturbations, invalid-parameter if h <= 0.
double GradCheck(const ScalarGraph& f, const Matrix& x, double h = 1e-5);

// Evaluates f at x without recording gradients.
double EvaluateScalar(const ScalarGraph& f, const Matrix& x);

}  // namespace dca

#endif  // DCA_GRAD_CHECK_H_
