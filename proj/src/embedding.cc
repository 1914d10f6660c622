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

#include "dca/embedding.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dca/error.h"

namespace dca {

namespace {

void CheckAamArgs(std::size_t label, std::size_t n_speakers, double scale,
                  double margin) {
  if (label >= n_speakers) {
    Fail(ErrorCode::kIndex, "speaker label " + std::to_string(label) +
                                " out of range for " +
                                std::to_string(n_speakers) + " speakers");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    Fail(ErrorCode::kInvalidParameter, "AAM scale must be positive");
  }
  if (!(margin >= 0.0) || !(margin < std::numbers::pi / 2)) {
    Fail(ErrorCode::kInvalidParameter, "AAM margin must lie in [0, pi/2)");
  }
}

double AamTargetSlope(double cosine, double margin) {
  const double c = std::clamp(cosine, -1.0, 1.0);
  if (c < -std::cos(margin)) return 1.0;
  const double sine = std::sqrt(std::max(1.0 - c * c, 1e-12));
  return std::cos(margin) + c * std::sin(margin) / sine;
}

}  // namespace

Var AspPool(Var h, Var w, Var b, Var v) {
  const std::size_t d = h.rows();
  if (w.rows() != d || w.cols() != d || b.rows() != d || b.cols() != 1 ||
      v.rows() != d || v.cols() != 1) {
    Fail(ErrorCode::kInvalidShape,
         "ASP weights do not match a " + std::to_string(d) + "-row input");
  }
  Var hidden = Tanh(AddColumnBroadcast(MatMul(w, h), b));
  Var alpha = SoftmaxRows(MatMul(Transpose(v), hidden));  // 1 x L
  Var alpha_col = Transpose(alpha);
  Var mean = MatMul(h, alpha_col);
  Var second = MatMul(Hadamard(h, h), alpha_col);
  Var stddev = SafeSqrt(Subtract(second, Hadamard(mean, mean)));
  return ConcatRows(mean, stddev);
}

UtteranceEmbedding AspPool(const Matrix& h, const AspWeights& weights,
                           std::string id) {
  Tape tape;
  Var out = AspPool(tape.Constant(h), tape.Constant(weights.w),
                    tape.Constant(weights.b), tape.Constant(weights.v));
  auto data = out.value().data();
  return {std::move(id), std::vector<double>(data.begin(), data.end())};
}

UtteranceEmbedding AspPool(const FeatureSequence& h, const AspWeights& weights,
                           std::string id) {
  return AspPool(h.data(), weights, std::move(id));
}

double CosineScore(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    Fail(ErrorCode::kInvalidShape, "cosine score of vectors with lengths " +
                                       std::to_string(a.size()) + " and " +
                                       std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) {
    Fail(ErrorCode::kDegenerateEmbedding,
         "cosine score of a zero-norm embedding");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double CosineScore(const UtteranceEmbedding& e1, const UtteranceEmbedding& e2) {
  try {
    return CosineScore(e1.vector, e2.vector);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateEmbedding) throw;
    Fail(ErrorCode::kDegenerateEmbedding,
         "zero-norm embedding in trial " + e1.id + " / " + e2.id);
  }
}

double AamTargetLogit(double cosine, double margin) {
  const double c = std::clamp(cosine, -1.0, 1.0);
  if (c < -std::cos(margin)) return c - (1.0 - std::cos(margin));
  return c * std::cos(margin) - std::sqrt(1.0 - c * c) * std::sin(margin);
}

Var AamSoftmaxLoss(Var embedding, std::size_t label, Var head_weights,
                   double scale, double margin) {
  if (embedding.cols() != 1 || head_weights.cols() != embedding.rows()) {
    Fail(ErrorCode::kInvalidShape,
         "classifier head " + head_weights.value().ShapeString() +
             " does not fit embedding " + embedding.value().ShapeString());
  }
  CheckAamArgs(label, head_weights.rows(), scale, margin);
  Var cosines = MatMul(NormalizeRows(head_weights), NormalizeCols(embedding));
  return cosines.tape->Record(
      "aam_softmax", {cosines},
      [=](Tape::Inputs in) {
        const Matrix& c = *in[0];
        std::vector<double> logits(c.rows());
        std::size_t top = 0;
        for (std::size_t j = 0; j < c.rows(); ++j) {
          logits[j] = scale * (j == label ? AamTargetLogit(c(j, 0), margin)
                                          : c(j, 0));
          if (logits[j] > logits[top]) top = j;
        }
        // log-sum-exp as max + log1p(rest) keeps tiny losses accurate.
        double rest = 0.0;
        for (std::size_t j = 0; j < c.rows(); ++j) {
          if (j != top) rest += std::exp(logits[j] - logits[top]);
        }
        return Matrix(1, 1, logits[top] - logits[label] + std::log1p(rest));
      },
      [=](Tape::Inputs in, const Matrix&, const Matrix& g,
          std::span<Matrix* const> grads) {
        const Matrix& c = *in[0];
        std::vector<double> logits(c.rows());
        double max_logit = -INFINITY;
        for (std::size_t j = 0; j < c.rows(); ++j) {
          logits[j] = scale * (j == label ? AamTargetLogit(c(j, 0), margin)
                                          : c(j, 0));
          max_logit = std::max(max_logit, logits[j]);
        }
        double total = 0.0;
        for (double& z : logits) total += (z = std::exp(z - max_logit));
        for (std::size_t j = 0; j < c.rows(); ++j) {
          const double p = logits[j] / total;
          const double dz = j == label ? p - 1.0 : p;
          const double slope =
              j == label ? AamTargetSlope(c(j, 0), margin) : 1.0;
          (*grads[0])(j, 0) += g(0, 0) * dz * scale * slope;
        }
      });
}

double AamSoftmaxLoss(std::span<const double> embedding, std::size_t label,
                      const ClassifierHead& head) {
  Tape tape;
  Var loss = AamSoftmaxLoss(tape.Constant(Matrix::Column(embedding)), label,
                            tape.Constant(head.weights), head.scale,
                            head.margin);
  return loss.value()(0, 0);
}

}  // namespace dca
