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

#include "dca/grad_check.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dca/error.h"

namespace dca {

double EvaluateScalar(const ScalarGraph& f, const Matrix& x) {
  Tape tape;
  Var out = f(tape, tape.Constant(x));
  if (out.rows() != 1 || out.cols() != 1) {
    Fail(ErrorCode::kInvalidShape,
         "grad_check needs a scalar function, got " + out.value().ShapeString());
  }
  return out.value()(0, 0);
}

double GradCheck(const ScalarGraph& f, const Matrix& x, double h) {
  if (!(h > 0.0)) {
    Fail(ErrorCode::kInvalidParameter, "grad_check step must be positive");
  }
  Matrix analytic;
  try {
    Tape tape;
    Var input = tape.Leaf(x);
    Var out = f(tape, input);
    tape.Backward(out);
    analytic = tape.grad(input);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumericDomain) throw;
    Fail(ErrorCode::kNumericDomain,
         std::string("grad_check: function not finite at x: ") + e.what());
  }

  double worst = 0.0;
  Matrix probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double original = x.data()[i];
    double plus = 0.0, minus = 0.0;
    try {
      probe.mutable_data()[i] = original + h;
      plus = EvaluateScalar(f, probe);
      probe.mutable_data()[i] = original - h;
      minus = EvaluateScalar(f, probe);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumericDomain) throw;
      std::ostringstream os;
      os << "grad_check: function not finite near entry " << i << ": "
         << e.what();
      Fail(ErrorCode::kNumericDomain, os.str());
    }
    probe.mutable_data()[i] = original;
    const double numeric = (plus - minus) / (2.0 * h);
    const double err = std::fabs(analytic.data()[i] - numeric) /
                       std::max(1.0, std::fabs(numeric));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace dca
